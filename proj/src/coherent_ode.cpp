// coherent_ode.cpp: RK4 integration of the coherent-form ODE and of the
// vector cocycle W

#include "qsc/qsde_sim.hpp"

namespace qsc {

namespace {

void check_pair(const CoherentFunction& f, const CoherentFunction& h, int d)
{
    if (!f.same_grid(h)) {
        throw GridMismatch("coherent functions f and h live on different grids");
    }
    if (f.d() != d) {
        throw GridMismatch("coherent function dimension does not match the noise dimension");
    }
}

// Structural combination A(t) on one slice, as an action matrix. The fbar.h id
// term cancels the delta part of lambda^m_n - delta, leaving the bare blocks.
Matrix slice_generator(const FormGenerator& gen, const Vector& a, const Vector& c)
{
    Matrix A = gen.scalar.action;
    for (int m = 0; m < gen.d; ++m) {
        const cplx am = std::conj(a(m));
        A += am * gen.up[m].action + c(m) * gen.down[m].action;
        for (int k = 0; k < gen.d; ++k) {
            A += (am * c(k)) * gen.matrix[m][k].action;
        }
    }
    return A;
}

} // namespace

MatrixElementTrace coherent_form_ode(const FormGenerator& gen, const Matrix& X,
                                     const CoherentFunction& f, const CoherentFunction& h)
{
    check_pair(f, h, gen.d);
    const Eigen::Index n = gen.n;
    if (X.rows() != n || X.cols() != n) {
        throw ShapeError("coherent_form_ode: observable must be n x n");
    }
    const double tau = f.tau();
    const Eigen::Index n2 = n * n;
    Matrix Psi = Matrix::Identity(n2, n2);
    const Vector x = vec(X);

    MatrixElementTrace trace;
    trace.times.push_back(0.0);
    trace.values.push_back(X);
    for (int k = 0; k < f.steps(); ++k) {
        const Matrix A = slice_generator(gen, f.slice(k), h.slice(k));
        // A(t) is constant on the step, so the four stages share it.
        const Matrix k1 = Psi * A;
        const Matrix k2 = (Psi + 0.5 * tau * k1) * A;
        const Matrix k3 = (Psi + 0.5 * tau * k2) * A;
        const Matrix k4 = (Psi + tau * k3) * A;
        Psi += (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        trace.times.push_back((k + 1) * tau);
        trace.values.push_back(unvec(Psi * x, n));
    }
    return trace;
}

std::vector<Matrix> vector_cocycle_steps(const HPParams& params, const CoherentFunction& h)
{
    params.validate();
    if (h.d() != params.d) {
        throw GridMismatch("coherent function dimension does not match the noise dimension");
    }
    const Eigen::Index n = params.n;
    const double tau = h.tau();
    const Matrix Id = Matrix::Identity(n, n);
    std::vector<Matrix> steps;
    steps.reserve(h.steps());
    for (int k = 0; k < h.steps(); ++k) {
        Matrix B = -params.K;
        for (int m = 0; m < params.d; ++m) B -= h.at(k, m) * params.K_row[m];
        // RK4 applied to W' = B W starting from W = I
        const Matrix k1 = B;
        const Matrix k2 = B * (Id + 0.5 * tau * k1);
        const Matrix k3 = B * (Id + 0.5 * tau * k2);
        const Matrix k4 = B * (Id + tau * k3);
        steps.push_back(Id + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return steps;
}

VectorCocycleTrace vector_cocycle(const HPParams& params, const CoherentFunction& h)
{
    const auto steps = vector_cocycle_steps(params, h);
    VectorCocycleTrace trace;
    Matrix W = Matrix::Identity(params.n, params.n);
    trace.times.push_back(0.0);
    trace.W.push_back(W);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        W = steps[k] * W;
        trace.times.push_back((k + 1) * h.tau());
        trace.W.push_back(W);
    }
    return trace;
}

} // namespace qsc
