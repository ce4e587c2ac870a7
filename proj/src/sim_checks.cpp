// sim_checks.cpp: solver adapters, Gram positivity, cocycle and martingale checks

#include "qsc/qsde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qsc {

MatrixElementSolver transfer_solver(const HPParams& params)
{
    return [params](const Matrix& X, const CoherentFunction& f, const CoherentFunction& h) {
        const ToyFockModel model = make_toy_fock(params, f.horizon(), f.steps());
        return simulate_transfer(model, X, f, h).final();
    };
}

MatrixElementSolver ode_solver(const FormGenerator& gen)
{
    return [gen](const Matrix& X, const CoherentFunction& f, const CoherentFunction& h) {
        return coherent_form_ode(gen, X, f, h).final();
    };
}

MatrixElementSolver picard_solver(const HPParams& params, int iters)
{
    return [params, iters](const Matrix& X, const CoherentFunction& f, const CoherentFunction& h) {
        return picard_solve(params, X, f, h, iters).trace.final();
    };
}

GramReport gram_positivity_check(const MatrixElementSolver& solver, const GramConfig& cfg,
                                 std::uint64_t seed)
{
    if (cfg.blocks < 1 || cfg.functions < 1 || cfg.psd_rank < 1) {
        throw ContractViolation("gram_positivity_check: empty configuration");
    }
    const Eigen::Index n = cfg.n;
    Rng rng(seed);
    GramReport rep;

    // [X_kl] = Y^dag Y
    const Matrix Y = random_matrix(rng, cfg.psd_rank, cfg.blocks * n);
    const Matrix big = Y.adjoint() * Y;
    for (int k = 0; k < cfg.blocks; ++k) {
        for (int l = 0; l < cfg.blocks; ++l) {
            rep.X_blocks.push_back(big.block(k * n, l * n, n, n));
        }
    }
    std::uniform_real_distribution<double> radius(0.0, cfg.amplitude);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int a = 0; a < cfg.functions; ++a) {
        CoherentFunction f(cfg.d, cfg.T, cfg.steps);
        for (int m = 0; m < cfg.d; ++m) {
            const cplx v = std::polar(radius(rng), phase(rng));
            for (int k = 0; k < cfg.steps; ++k) f.set(k, m, v);
        }
        rep.functions.push_back(std::move(f));
    }

    const int F = cfg.functions;
    const Eigen::Index dim = cfg.blocks * F * n;
    rep.gram = Matrix::Zero(dim, dim);
    for (int k = 0; k < cfg.blocks; ++k) {
        for (int l = 0; l < cfg.blocks; ++l) {
            const Matrix& X = rep.X_blocks[k * cfg.blocks + l];
            for (int a = 0; a < F; ++a) {
                for (int b = 0; b < F; ++b) {
                    rep.gram.block((k * F + a) * n, (l * F + b) * n, n, n) =
                        solver(X, rep.functions[a], rep.functions[b]);
                }
            }
        }
    }
    rep.min_eig = min_hermitian_eigenvalue(rep.gram);
    return rep;
}

double cocycle_residual(const ToyFockModel& model, const CoherentFunction& f,
                        const CoherentFunction& h, int s, int r, int shift_fault)
{
    if (s < 0 || r < 0 || s + r > model.steps) {
        throw ShapeError("cocycle_residual: need 0 <= s, r and s + r <= steps");
    }
    const SuperOperator head = transfer_map(model, f, h, 0, s);
    // The shifted cocycle runs on re-indexed coherent arguments f(. + s).
    const CoherentFunction fs = f.shifted(s + shift_fault, r);
    const CoherentFunction hs = h.shifted(s + shift_fault, r);
    const SuperOperator tail = transfer_map(model, fs, hs, 0, r);
    const SuperOperator whole = transfer_map(model, f, h, 0, s + r);
    return max_abs(compose(head, tail).action - whole.action);
}

MartingaleReport martingale_check(const FormGenerator& gen, double T, int steps, double tol)
{
    if (!(T > 0.0) || steps < 1) {
        throw ContractViolation("martingale_check: need T > 0 and steps >= 1");
    }
    const Eigen::Index n = gen.n;
    const Matrix Id = Matrix::Identity(n, n);
    MartingaleReport rep;
    std::vector<Matrix> values;
    bool identity_throughout = true;
    for (int k = 0; k <= steps; ++k) {
        const double t = T * k / steps;
        Matrix P = semigroup_expm(gen, t, Id);
        identity_throughout = identity_throughout && max_abs(P - Id) <= tol;
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(P), Eigen::EigenvaluesOnly);
        rep.times.push_back(t);
        rep.eigenvalues.push_back(es.eigenvalues());
        values.push_back(std::move(P));
    }
    if (identity_throughout) {
        rep.classification = Normalization::martingale;
        return rep;
    }
    const Normalization drift = classify_drift(gen.D, tol);
    bool monotone = drift != Normalization::neither;
    for (int k = 0; monotone && k < steps; ++k) {
        monotone = min_hermitian_eigenvalue(values[k] - values[k + 1]) >= -tol;
    }
    rep.classification = monotone ? Normalization::submartingale : Normalization::neither;
    return rep;
}

} // namespace qsc
