// dilation.cpp: Choi-based Kraus extraction, least-squares HP parameter
// recovery, and the two dilation constructions

#include "qsc/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qsc {

namespace {

std::vector<Matrix> matrix_unit_basis(Eigen::Index n)
{
    std::vector<Matrix> basis;
    basis.reserve(n * n);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) basis.push_back(matrix_unit(n, p, q));
    }
    return basis;
}

std::string unit_name(Eigen::Index n, std::size_t a)
{
    std::ostringstream os;
    os << "E_" << a / n << a % n;
    return os.str();
}

} // namespace

ExchangeKraus kraus_from_exchange_block(const FormGenerator& gen, double tol)
{
    const Eigen::Index n = gen.n;
    const int d = gen.d;
    const Eigen::Index nd = n * d;
    const SuperOperator phi = gen.exchange_map();
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(phi.choi()));
    const RealVector& evals = es.eigenvalues();

    ExchangeKraus out;
    out.choi_eigenvalues = evals;
    const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
    if (evals(0) < -tol * scale) {
        throw NotCompletelyPositive("exchange block is not completely positive", evals(0));
    }

    // Choi = sum_i v_i v_i^dag with v_i block p equal to A_i^dag e_p, where
    // A_i = [L^i_1, ..., L^i_d] is n x nd.
    for (Eigen::Index c = evals.size() - 1; c >= 0; --c) {
        if (evals(c) <= tol * scale) break;
        const Vector w = std::sqrt(evals(c)) * es.eigenvectors().col(c);
        Matrix A(n, nd);
        for (Eigen::Index p = 0; p < n; ++p) {
            A.row(p) = w.segment(p * nd, nd).adjoint();
        }
        std::vector<Matrix> row;
        for (int m = 0; m < d; ++m) row.push_back(A.block(0, m * n, n, n));
        out.Lmat.push_back(std::move(row));
    }
    out.r = static_cast<int>(out.Lmat.size());

    for (const auto& E : matrix_unit_basis(n)) {
        for (int m = 0; m < d; ++m) {
            for (int k = 0; k < d; ++k) {
                Matrix rebuilt = Matrix::Zero(n, n);
                for (int i = 0; i < out.r; ++i) {
                    rebuilt += out.Lmat[i][m].adjoint() * E * out.Lmat[i][k];
                }
                out.reconstruction_residual = std::max(
                    out.reconstruction_residual, max_abs(rebuilt - gen.matrix[m][k].apply(E)));
            }
        }
    }
    return out;
}

Extraction extract_hp_params(const FormGenerator& gen, double tol, double residual_tol)
{
    const Eigen::Index n = gen.n;
    const Eigen::Index n2 = n * n;
    const int d = gen.d;
    const ExchangeKraus kraus = kraus_from_exchange_block(gen, tol);
    const int r = kraus.r;
    const Matrix Id = Matrix::Identity(n, n);
    const auto basis = matrix_unit_basis(n);

    HPParams p;
    p.n = n;
    p.d = d;
    p.kraus_Lmat = kraus.Lmat;

    if (r == 0) {
        // Vanishing exchange block: keep a single zero channel so the
        // parameter shapes stay well formed.
        p.r = 1;
        p.kraus_Lmat.assign(1, std::vector<Matrix>(d, Matrix::Zero(n, n)));
    } else {
        p.r = r;
    }

    // Unknowns: [vec L^1 .. vec L^r, vec M_1 .. vec M_d] with M_m = K_m^dag.
    const Eigen::Index unknowns = (p.r + d) * n2;
    const Eigen::Index equations = static_cast<Eigen::Index>(d) * n2 * n2;
    Matrix A = Matrix::Zero(equations, unknowns);
    Vector b(equations);
    Eigen::Index row = 0;
    for (int m = 0; m < d; ++m) {
        for (const auto& E : basis) {
            for (int i = 0; i < p.r; ++i) {
                A.block(row, i * n2, n2, n2) = kron(Id, p.kraus_Lmat[i][m].adjoint() * E);
            }
            A.block(row, (p.r + m) * n2, n2, n2) = -kron(E.transpose(), Id);
            b.segment(row, n2) = vec(gen.up[m].apply(E));
            row += n2;
        }
    }
    const Vector x = A.completeOrthogonalDecomposition().solve(b);

    p.kraus_L.clear();
    for (int i = 0; i < p.r; ++i) p.kraus_L.push_back(unvec(x.segment(i * n2, n2), n));
    p.K_row.clear();
    for (int m = 0; m < d; ++m) {
        p.K_row.push_back(unvec(x.segment((p.r + m) * n2, n2), n).adjoint());
    }

    const Matrix gram = [&] {
        Matrix S = Matrix::Zero(n, n);
        for (const auto& L : p.kraus_L) S += L.adjoint() * L;
        return S;
    }();
    const Matrix K_herm = hermitize(0.5 * (gram - gen.D));

    // i[H, X] = lambda(X) - phi(X) + {K_h, X}
    Matrix C(n2 * n2, n2);
    Vector rhs(n2 * n2);
    row = 0;
    for (const auto& E : basis) {
        Matrix target = gen.scalar.apply(E) + K_herm * E + E * K_herm;
        for (const auto& L : p.kraus_L) target -= L.adjoint() * E * L;
        C.block(row, 0, n2, n2) = I_unit * (kron(E.transpose(), Id) - kron(Id, E));
        rhs.segment(row, n2) = vec(target);
        row += n2;
    }
    Matrix H = hermitize(unvec(C.completeOrthogonalDecomposition().solve(rhs), n));
    H -= (H.trace() / static_cast<double>(n)) * Id;

    p.H = H;
    p.K = K_herm + I_unit * H;

    Extraction result;
    result.rank = r;
    result.block_residual = assemble_from_hp(p).block_distance(gen);
    result.params = std::move(p);
    if (!(result.block_residual <= residual_tol)) {
        throw ResidualTooLarge("extracted parameters do not reassemble the generator",
                               result.block_residual, "generator blocks");
    }
    return result;
}

double PreHilbertReport::max() const
{
    return std::max({j_multiplicative, j_unital, k_derivation, kstar_derivation, l_identity,
                     l_adjoint});
}

PreHilbertDilation::PreHilbertDilation(const HPParams& params, Matrix D)
    : n_(params.n), d_(params.d), r_(params.r), D_(std::move(D)), H_(params.H)
{
    params.validate();
    if (D_.rows() != n_ || D_.cols() != n_) {
        throw ShapeError("PreHilbertDilation: D must be n x n");
    }
    if (!is_hermitian(D_, 1e-10)) {
        throw ContractViolation("PreHilbertDilation: D is not Hermitian");
    }
    const Eigen::Index nr = n_ * r_;
    Lop_.resize(nr, n_);
    for (int i = 0; i < r_; ++i) Lop_.block(i * n_, 0, n_, n_) = params.kraus_L[i];
    for (int m = 0; m < d_; ++m) {
        Matrix Lc(nr, n_);
        for (int i = 0; i < r_; ++i) Lc.block(i * n_, 0, n_, n_) = params.kraus_Lmat[i][m];
        Lminus_.push_back(Lop_.adjoint() * Lc - params.K_row[m]);
        Lcirc_.push_back(std::move(Lc));
    }
}

Matrix PreHilbertDilation::j(const Matrix& X) const
{
    Matrix out = Matrix::Zero(n_ * r_, n_ * r_);
    for (int i = 0; i < r_; ++i) out.block(i * n_, i * n_, n_, n_) = X;
    return out;
}

Matrix PreHilbertDilation::k(const Matrix& X) const
{
    return j(X) * Lop_ - Lop_ * X;
}

Matrix PreHilbertDilation::kstar(const Matrix& X) const
{
    return Lop_.adjoint() * j(X) - X * Lop_.adjoint();
}

Matrix PreHilbertDilation::l(const Matrix& X) const
{
    return 0.5 * (Lop_.adjoint() * k(X) + kstar(X) * Lop_ + (X * D_ - D_ * X))
         + I_unit * (H_ * X - X * H_);
}

PreHilbertReport PreHilbertDilation::verify() const
{
    PreHilbertReport rep;
    const auto basis = matrix_unit_basis(n_);
    const Matrix Id = Matrix::Identity(n_, n_);
    rep.j_unital = max_abs(j(Id) - Matrix::Identity(n_ * r_, n_ * r_));
    for (const auto& X : basis) {
        const Matrix Xd = X.adjoint();
        rep.l_adjoint = std::max(rep.l_adjoint,
                                 max_abs(l(Xd).adjoint() - l(X) - (D_ * X - X * D_)));
        for (const auto& Z : basis) {
            const Matrix XZ = Xd * Z;
            rep.j_multiplicative =
                std::max(rep.j_multiplicative, max_abs(j(XZ) - j(X).adjoint() * j(Z)));
            rep.k_derivation =
                std::max(rep.k_derivation, max_abs(k(XZ) - j(X).adjoint() * k(Z) - k(Xd) * Z));
            rep.kstar_derivation = std::max(
                rep.kstar_derivation, max_abs(kstar(XZ) - Xd * kstar(Z) - kstar(Xd) * j(Z)));
            rep.l_identity = std::max(
                rep.l_identity, max_abs(l(XZ) - Xd * l(Z) - l(Xd) * Z - kstar(Xd) * k(Z)));
        }
    }
    return rep;
}

PreHilbertDilation build_pre_hilbert(const HPParams& params, const Matrix& D)
{
    return PreHilbertDilation(params, D);
}

Matrix bold_lambda(const FormGenerator& gen, const Matrix& X)
{
    const Eigen::Index n = gen.n;
    Matrix out(n * (gen.d + 1), n * (gen.d + 1));
    out.block(0, 0, n, n) = gen.scalar.apply(X);
    for (int m = 0; m < gen.d; ++m) {
        out.block(0, (m + 1) * n, n, n) = gen.down[m].apply(X);
        out.block((m + 1) * n, 0, n, n) = gen.up[m].apply(X);
        for (int k = 0; k < gen.d; ++k) {
            out.block((m + 1) * n, (k + 1) * n, n, n) = gen.matrix[m][k].apply(X);
        }
    }
    return out;
}

double PseudoDilationReport::max() const
{
    return std::max({multiplicativity, unital, lflat_consistency, reconstruction});
}

PseudoDilation::PseudoDilation(const PreHilbertDilation& pre)
    : pre_(pre), metric_(pre.D(), pre.kspace_dim())
{
    const Eigen::Index n = pre.n();
    const Eigen::Index nr = pre.kspace_dim();
    const int d = pre.d();
    const Eigen::Index edim = metric_.dim();
    const Eigen::Index in = n * (d + 1);

    // Columns: [eta | eta^1 .. eta^d]; rows: [- | circ | +].
    Lbold_ = Matrix::Zero(edim, in);
    Lbold_.block(n + nr, 0, n, n).setIdentity();
    for (int m = 0; m < d; ++m) {
        Lbold_.block(0, (m + 1) * n, n, n) = pre.Lminus()[m];
        Lbold_.block(n, (m + 1) * n, nr, n) = pre.Lcirc()[m];
    }

    Lflat_ = Matrix::Zero(in, edim);
    Lflat_.block(0, 0, n, n).setIdentity();
    Lflat_.block(0, n + nr, n, n) = pre.D();
    for (int m = 0; m < d; ++m) {
        Lflat_.block((m + 1) * n, n, n, nr) = pre.Lcirc()[m].adjoint();
        Lflat_.block((m + 1) * n, n + nr, n, n) = pre.Lminus()[m].adjoint();
    }
}

Matrix PseudoDilation::jhat(const Matrix& X) const
{
    const Eigen::Index n = pre_.n();
    const Eigen::Index nr = pre_.kspace_dim();
    Matrix out = Matrix::Zero(metric_.dim(), metric_.dim());
    out.block(0, 0, n, n) = X;
    out.block(0, n, n, nr) = pre_.kstar(X);
    out.block(0, n + nr, n, n) = pre_.l(X);
    out.block(n, n, nr, nr) = pre_.j(X);
    out.block(n, n + nr, nr, n) = pre_.k(X);
    out.block(n + nr, n + nr, n, n) = X;
    return out;
}

PseudoDilationReport PseudoDilation::verify(const FormGenerator& gen) const
{
    const Eigen::Index n = pre_.n();
    if (gen.n != n || gen.d != pre_.d()) {
        throw ShapeError("PseudoDilation::verify: generator shape does not match");
    }
    PseudoDilationReport rep;
    const auto basis = matrix_unit_basis(n);
    rep.unital = max_abs(jhat(Matrix::Identity(n, n)) -
                         Matrix::Identity(metric_.dim(), metric_.dim()));
    rep.lflat_consistency = max_abs(Lflat_ - Lbold_.adjoint() * metric_.G());
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const Matrix& X = basis[a];
        const double rec = max_abs(Lflat_ * jhat(X) * Lbold_ - bold_lambda(gen, X));
        if (rec > rep.reconstruction || rep.worst_element.empty()) {
            rep.reconstruction = std::max(rep.reconstruction, rec);
            rep.worst_element = unit_name(n, a);
        }
        const Matrix jx_flat = metric_.flat(jhat(X));
        for (const auto& Z : basis) {
            rep.multiplicativity = std::max(
                rep.multiplicativity, max_abs(jhat(X.adjoint() * Z) - jx_flat * jhat(Z)));
        }
    }
    return rep;
}

PseudoDilationResult build_pseudo_dilation(const PreHilbertDilation& pre,
                                           const FormGenerator& gen, double tol)
{
    if (max_abs(pre.D() - gen.D) > tol) {
        throw ContractViolation("build_pseudo_dilation: dilation corner D differs from lambda(I)");
    }
    PseudoDilation dil(pre);
    PseudoDilationReport rep = dil.verify(gen);
    if (rep.max() > tol) {
        throw ResidualTooLarge("pseudo-Hilbert dilation does not reproduce the generator",
                               rep.max(), rep.worst_element);
    }
    return {std::move(dil), std::move(rep)};
}

} // namespace qsc
