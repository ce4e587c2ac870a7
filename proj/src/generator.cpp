// generator.cpp: form-generator assembly, dissipator kernel, CCP verdicts

#include "qsc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsc {

FormGenerator::FormGenerator(SuperOperator scalar_, std::vector<SuperOperator> up_,
                             std::vector<SuperOperator> down_,
                             std::vector<std::vector<SuperOperator>> matrix_)
    : n(scalar_.in_dim),
      d(static_cast<int>(up_.size())),
      scalar(std::move(scalar_)),
      up(std::move(up_)),
      down(std::move(down_)),
      matrix(std::move(matrix_))
{
    if (d < 1) {
        throw ShapeError("FormGenerator: need at least one noise dimension");
    }
    auto check = [this](const SuperOperator& s) {
        if (s.in_dim != n || s.out_dim != n) {
            throw ShapeError("FormGenerator: every block must map M_n to M_n");
        }
    };
    check(scalar);
    if (static_cast<int>(down.size()) != d || static_cast<int>(matrix.size()) != d) {
        throw ShapeError("FormGenerator: up, down and matrix must all have d entries");
    }
    for (int m = 0; m < d; ++m) {
        check(up[m]);
        check(down[m]);
        if (static_cast<int>(matrix[m].size()) != d) {
            throw ShapeError("FormGenerator: exchange block must be d x d");
        }
        for (const auto& s : matrix[m]) check(s);
    }
    D = scalar.apply(Matrix::Identity(n, n));
}

FormGenerator FormGenerator::zero(Eigen::Index n, int d)
{
    const auto z = SuperOperator::zero(n);
    return {z, std::vector<SuperOperator>(d, z), std::vector<SuperOperator>(d, z),
            std::vector<std::vector<SuperOperator>>(d, std::vector<SuperOperator>(d, z))};
}

double FormGenerator::flat_symmetry_residual() const
{
    double res = max_abs(scalar.adjoint_map().action - scalar.action);
    for (int m = 0; m < d; ++m) {
        // lambda^m(X^dag) = lambda_m(X)^dag
        res = std::max(res, max_abs(down[m].adjoint_map().action - up[m].action));
        for (int k = 0; k < d; ++k) {
            res = std::max(res, max_abs(matrix[k][m].adjoint_map().action - matrix[m][k].action));
        }
    }
    return res;
}

double FormGenerator::block_distance(const FormGenerator& other) const
{
    if (other.n != n || other.d != d) {
        throw ShapeError("block_distance: generators differ in shape");
    }
    double res = max_abs(scalar.action - other.scalar.action);
    for (int m = 0; m < d; ++m) {
        res = std::max(res, max_abs(up[m].action - other.up[m].action));
        res = std::max(res, max_abs(down[m].action - other.down[m].action));
        for (int k = 0; k < d; ++k) {
            res = std::max(res, max_abs(matrix[m][k].action - other.matrix[m][k].action));
        }
    }
    return res;
}

SuperOperator FormGenerator::exchange_map() const
{
    return SuperOperator::from_map(n, n * d, [this](const Matrix& X) -> Matrix {
        Matrix Y(n * d, n * d);
        for (int m = 0; m < d; ++m) {
            for (int k = 0; k < d; ++k) {
                Y.block(m * n, k * n, n, n) = matrix[m][k].apply(X);
            }
        }
        return Y;
    });
}

const char* to_string(Normalization c)
{
    switch (c) {
    case Normalization::martingale: return "martingale";
    case Normalization::submartingale: return "submartingale";
    case Normalization::neither: return "neither";
    }
    return "neither";
}

Normalization classify_drift(const Matrix& D, double tol)
{
    if (max_abs(D) <= tol) return Normalization::martingale;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(D), Eigen::EigenvaluesOnly);
    if (is_hermitian(D, tol) && es.eigenvalues().maxCoeff() <= tol) {
        return Normalization::submartingale;
    }
    return Normalization::neither;
}

FormGenerator assemble_from_hp(const HPParams& p)
{
    p.validate();
    const Eigen::Index n = p.n;
    const Matrix Id = Matrix::Identity(n, n);

    SuperOperator scalar = SuperOperator::sandwich(-p.K.adjoint(), Id)
                         - SuperOperator::sandwich(Id, p.K);
    std::vector<SuperOperator> up, down;
    std::vector<std::vector<SuperOperator>> matrix(p.d);
    for (int m = 0; m < p.d; ++m) {
        up.push_back(SuperOperator::sandwich(-p.K_row[m].adjoint(), Id));
        down.push_back(SuperOperator::sandwich(-Id, p.K_row[m]));
        for (int k = 0; k < p.d; ++k) matrix[m].push_back(SuperOperator::zero(n));
    }
    for (int i = 0; i < p.r; ++i) {
        const Matrix& L = p.kraus_L[i];
        scalar += SuperOperator::sandwich(L.adjoint(), L);
        for (int m = 0; m < p.d; ++m) {
            const Matrix& Lm = p.kraus_Lmat[i][m];
            up[m] += SuperOperator::sandwich(Lm.adjoint(), L);
            down[m] += SuperOperator::sandwich(L.adjoint(), Lm);
            for (int k = 0; k < p.d; ++k) {
                matrix[m][k] += SuperOperator::sandwich(Lm.adjoint(), p.kraus_Lmat[i][k]);
            }
        }
    }
    return {std::move(scalar), std::move(up), std::move(down), std::move(matrix)};
}

SuperOperator semigroup_generator(const FormGenerator& gen)
{
    return gen.scalar;
}

Dissipator build_dissipator(const FormGenerator& gen, double symmetry_tol)
{
    const double sym = gen.flat_symmetry_residual();
    if (sym > symmetry_tol) {
        throw ContractViolation("build_dissipator: generator violates the flat symmetry (residual " +
                                std::to_string(sym) + ")");
    }
    const Eigen::Index n = gen.n;
    const int d = gen.d;
    Dissipator diss{n, d, {}};
    const Eigen::Index rows = n * n * (d + 1) * n;
    if (rows > kMaxKernelRows) {
        throw ShapeError("build_dissipator: kernel too large for dense assembly");
    }
    diss.kernel = Matrix::Zero(rows, rows);

    const Eigen::Index basis = n * n;
    std::vector<Matrix> E(basis);
    for (Eigen::Index a = 0; a < basis; ++a) E[a] = matrix_unit(n, a / n, a % n);

    // Per-basis images reused across pairs.
    std::vector<Matrix> lam(basis), lam_adj(basis);
    std::vector<std::vector<Matrix>> lam_down(d, std::vector<Matrix>(basis));
    for (Eigen::Index a = 0; a < basis; ++a) {
        lam[a] = gen.scalar.apply(E[a]);
        lam_adj[a] = gen.scalar.apply(E[a].adjoint());
        for (int m = 0; m < d; ++m) {
            lam_down[m][a] = gen.down[m].apply(E[a]);
        }
    }

    for (Eigen::Index a = 0; a < basis; ++a) {
        const Matrix Xd = E[a].adjoint();
        for (Eigen::Index b = 0; b < basis; ++b) {
            const Matrix& Z = E[b];
            const Matrix XZ = Xd * Z;
            auto block = [&](int mu, int nu) {
                return diss.kernel.block(diss.slot(a, mu, 0), diss.slot(b, nu, 0), n, n);
            };
            block(0, 0) = gen.scalar.apply(XZ) - Xd * lam[b] - lam_adj[a] * Z + Xd * gen.D * Z;
            for (int k = 0; k < d; ++k) {
                block(0, k + 1) = gen.down[k].apply(XZ) - Xd * lam_down[k][b];
                for (int m = 0; m < d; ++m) {
                    block(m + 1, k + 1) = gen.matrix[m][k].apply(XZ);
                }
            }
        }
    }
    // Delta^m_+(X, Z) = Delta^-_m(Z, X)^dag
    for (Eigen::Index a = 0; a < basis; ++a) {
        for (Eigen::Index b = 0; b < basis; ++b) {
            for (int m = 0; m < d; ++m) {
                diss.kernel.block(diss.slot(a, m + 1, 0), diss.slot(b, 0, 0), n, n) =
                    diss.kernel.block(diss.slot(b, 0, 0), diss.slot(a, m + 1, 0), n, n).adjoint();
            }
        }
    }
    return diss;
}

CcpVerdict check_conditionally_cp(const FormGenerator& gen, double tol)
{
    const Dissipator diss = build_dissipator(gen);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(diss.kernel));
    const RealVector& evals = es.eigenvalues();

    CcpVerdict v;
    v.min_eig = evals(0);
    v.max_abs_eig = evals.cwiseAbs().maxCoeff();
    v.threshold = -tol * std::max(1.0, v.max_abs_eig);
    v.accepted = v.min_eig >= v.threshold;
    if (!v.accepted) {
        const Vector w = es.eigenvectors().col(0);
        const Eigen::Index block = (gen.d + 1) * gen.n;
        const double cutoff = 1e-12 * w.cwiseAbs().maxCoeff();
        for (Eigen::Index a = 0; a < diss.basis_size(); ++a) {
            Vector eta = w.segment(a * block, block);
            if (eta.cwiseAbs().maxCoeff() > cutoff) {
                v.witness.push_back({matrix_unit(gen.n, a / gen.n, a % gen.n), std::move(eta)});
            }
        }
    }
    return v;
}

cplx conditional_form(const FormGenerator& gen, const SampledFamily& family)
{
    const Eigen::Index n = gen.n;
    const int d = gen.d;
    cplx total = 0.0;
    const std::size_t count = family.X.size();
    for (std::size_t k = 0; k < count; ++k) {
        const Vector& ek = family.eta[k];
        for (std::size_t l = 0; l < count; ++l) {
            const Vector& el = family.eta[l];
            const Matrix XZ = family.X[k].adjoint() * family.X[l];
            auto comp = [n](const Vector& v, int mu) { return v.segment(mu * n, n); };
            total += comp(ek, 0).dot(gen.scalar.apply(XZ) * comp(el, 0));
            for (int m = 0; m < d; ++m) {
                total += comp(ek, 0).dot(gen.down[m].apply(XZ) * comp(el, m + 1));
                total += comp(ek, m + 1).dot(gen.up[m].apply(XZ) * comp(el, 0));
                for (int j = 0; j < d; ++j) {
                    total += comp(ek, m + 1).dot(gen.matrix[m][j].apply(XZ) * comp(el, j + 1));
                }
            }
        }
    }
    return total;
}

SamplingReport sample_conditional_positivity(const FormGenerator& gen, int trials,
                                             std::uint64_t seed)
{
    if (trials < 1) {
        throw ContractViolation("sample_conditional_positivity: trials must be >= 1");
    }
    const Eigen::Index n = gen.n;
    const Eigen::Index block = (gen.d + 1) * n;
    Rng rng(seed);
    std::uniform_int_distribution<int> family_size(2, static_cast<int>(n * n) + 1);

    SamplingReport report;
    report.trials = trials;
    report.min_value = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        SampledFamily fam;
        const int count = family_size(rng);
        Vector residual = Vector::Zero(n);
        for (int k = 0; k < count; ++k) {
            fam.X.push_back(random_matrix(rng, n, n));
            fam.eta.push_back(random_vector(rng, block));
        }
        for (int k = 0; k + 1 < count; ++k) {
            residual += fam.X[k] * fam.eta[k].head(n);
        }
        // sum_k X_k eta_k^+ = 0
        fam.eta.back().head(n) = -fam.X.back().partialPivLu().solve(residual);

        double scale = 0.0;
        for (int k = 0; k < count; ++k) {
            const double xn = fam.X[k].norm();
            scale += fam.eta[k].squaredNorm() * xn * xn;
        }
        const double value = conditional_form(gen, fam).real() / scale;
        if (value < report.min_value) {
            report.min_value = value;
            report.worst = std::move(fam);
        }
    }
    return report;
}

} // namespace qsc
