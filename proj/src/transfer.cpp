// transfer.cpp: repeated-interaction discretization of the vector cocycle

#include "qsc/qsde_sim.hpp"

#include <algorithm>
#include <cmath>

namespace qsc {

Matrix ToyFockModel::block(int p, int q) const
{
    const Eigen::Index n = params.n;
    return step_op.block(p * n, q * n, n, n);
}

ToyFockModel make_toy_fock(const HPParams& params, double T, int steps)
{
    params.validate();
    if (!(T > 0.0) || steps < 1) {
        throw ContractViolation("make_toy_fock: need T > 0 and steps >= 1");
    }
    ToyFockModel m;
    m.params = params;
    m.T = T;
    m.steps = steps;
    m.tau = T / steps;
    m.slice_dim = 1 + std::max(params.d, params.r);

    const Eigen::Index n = params.n;
    const int s = m.slice_dim;
    const double sq = std::sqrt(m.tau);
    const Matrix Id = Matrix::Identity(n, n);
    m.step_op = Matrix::Zero(s * n, s * n);
    auto blk = [&](int p, int q) { return m.step_op.block(p * n, q * n, n, n); };

    for (int p = 0; p < s; ++p) blk(p, p) = Id - m.tau * params.K;
    for (int i = 1; i < s; ++i) {
        for (int k = 1; k < s; ++k) {
            Matrix coeff = (i == k) ? Matrix(-Id) : Matrix::Zero(n, n);
            if (i <= params.r && k <= params.d) coeff += params.kraus_Lmat[i - 1][k - 1];
            blk(i, k) += coeff;
        }
        if (i <= params.r) blk(i, 0) += sq * params.kraus_L[i - 1];
        if (i <= params.d) blk(0, i) -= sq * params.K_row[i - 1];
    }
    if (!m.step_op.allFinite()) {
        throw ContractViolation("make_toy_fock: step operator has non-finite entries");
    }
    return m;
}

namespace {

// Slice coherent vector e_0 + sqrt(tau) sum_n a^n e_n, padded to the slice.
Vector slice_vector(const ToyFockModel& model, const Vector& a)
{
    Vector u = Vector::Zero(model.slice_dim);
    u(0) = 1.0;
    const double sq = std::sqrt(model.tau);
    for (Eigen::Index m = 0; m < a.size(); ++m) u(m + 1) = sq * a(m);
    return u;
}

// Blocks (I (x) e_p^dag) M (I (x) u) for every slice level p.
std::vector<Matrix> contract_ket(const ToyFockModel& model, const Vector& u)
{
    const Eigen::Index n = model.params.n;
    std::vector<Matrix> out(model.slice_dim, Matrix::Zero(n, n));
    for (int p = 0; p < model.slice_dim; ++p) {
        for (int q = 0; q < model.slice_dim; ++q) {
            if (u(q) != cplx(0.0)) out[p] += u(q) * model.step_op.block(p * n, q * n, n, n);
        }
    }
    return out;
}

void check_grid(const ToyFockModel& model, const CoherentFunction& f)
{
    if (f.steps() != model.steps || std::abs(f.horizon() - model.T) > 1e-12 * std::max(1.0, model.T)) {
        throw GridMismatch("coherent function grid does not match the model grid");
    }
    if (f.d() != model.params.d) {
        throw GridMismatch("coherent function dimension does not match the noise dimension");
    }
}

} // namespace

SuperOperator slice_transfer(const ToyFockModel& model, const Vector& f_slice,
                             const Vector& h_slice)
{
    const Eigen::Index n = model.params.n;
    const auto A = contract_ket(model, slice_vector(model, f_slice));
    const auto B = contract_ket(model, slice_vector(model, h_slice));
    Matrix act = Matrix::Zero(n * n, n * n);
    for (int p = 0; p < model.slice_dim; ++p) {
        act += kron(B[p].transpose(), A[p].adjoint());
    }
    return {n, n, std::move(act)};
}

SuperOperator transfer_map(const ToyFockModel& model, const CoherentFunction& f,
                           const CoherentFunction& h, int first, int count)
{
    if (first < 0 || count < 0) {
        throw ShapeError("transfer_map: slice range out of bounds");
    }
    SuperOperator S = SuperOperator::identity(model.params.n);
    for (int k = first; k < first + count; ++k) {
        S.action = S.action * slice_transfer(model, f.slice(k), h.slice(k)).action;
    }
    return S;
}

MatrixElementTrace simulate_transfer(const ToyFockModel& model, const Matrix& X,
                                     const CoherentFunction& f, const CoherentFunction& h)
{
    check_grid(model, f);
    check_grid(model, h);
    const Eigen::Index n = model.params.n;
    if (X.rows() != n || X.cols() != n) {
        throw ShapeError("simulate_transfer: observable must be n x n");
    }
    MatrixElementTrace trace;
    Matrix S = Matrix::Identity(n * n, n * n);
    const Vector x = vec(X);
    trace.times.push_back(0.0);
    trace.values.push_back(X);
    for (int k = 0; k < model.steps; ++k) {
        S = S * slice_transfer(model, f.slice(k), h.slice(k)).action;
        trace.times.push_back((k + 1) * model.tau);
        trace.values.push_back(unvec(S * x, n));
    }
    return trace;
}

} // namespace qsc
