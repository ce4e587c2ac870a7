// qsde_sim.hpp: four realizations of the cocycle on coherent matrix elements
//
//   semigroup_expm      vacuum expectation, exp(t lambda) on column-stacked X
//   simulate_transfer   repeated-interaction (toy Fock) chain of slices
//   coherent_form_ode   RK4 on the superoperator ODE of the coherent form
//   picard_solve        iteration of the integral equation driven by V_t
//
// All traces are matrix elements against unnormalized exponential vectors of
// coherent functions supported on the simulated window, so no exterior
// normalization factor appears.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qsc/generator.hpp"
#include "qsc/hp_params.hpp"

namespace qsc {

/// Piecewise-constant f^n(t) on a uniform grid: row k holds the value on
/// [t_k, t_{k+1}). Rows past the end read as zero.
class CoherentFunction {
public:
    CoherentFunction(int d, double T, int steps);
    CoherentFunction(double T, Matrix values);

    static CoherentFunction vacuum(int d, double T, int steps);
    static CoherentFunction constant(int d, double T, int steps, cplx value);

    int d() const { return static_cast<int>(values_.cols()); }
    int steps() const { return static_cast<int>(values_.rows()); }
    double horizon() const { return T_; }
    double tau() const { return T_ / steps(); }
    const Matrix& values() const { return values_; }

    // value of component m (0-based) on slice k
    cplx at(int k, int m) const;
    Vector slice(int k) const;
    void set(int k, int m, cplx v) { values_(k, m) = v; }

    // f(. + s*tau) on `count` slices
    CoherentFunction shifted(int s, int count) const;

    bool same_grid(const CoherentFunction& other) const;

private:
    double T_;
    Matrix values_;   // steps x d
};

struct MatrixElementTrace {
    std::vector<double> times;
    std::vector<Matrix> values;   // Phi_k at times[k]; Phi_0 = X
    const Matrix& final() const { return values.back(); }
};

struct VectorCocycleTrace {
    std::vector<double> times;
    std::vector<Matrix> W;        // W_0 = I
};

/// exp(t lambda) X via scaling and squaring.
Matrix semigroup_expm(const FormGenerator& gen, double t, const Matrix& X);

/// Discrete flow on h (x) C^s, s = 1 + max(d, r). The step operator is
///   M = I - tau K (x) I_s + sum_{i,n} (L^i_n - delta I) (x) E_in
///       + sqrt(tau) sum_i L^i (x) E_i0 - sqrt(tau) sum_n K_n (x) E_0n
/// with i, n running over the padded range 1..s-1 (missing coefficients zero).
struct ToyFockModel {
    HPParams params;
    double T = 0.0;
    int steps = 0;
    double tau = 0.0;
    int slice_dim = 0;
    Matrix step_op;   // (slice_dim * n)^2, block (p, q) is the n x n coefficient of E_pq

    Matrix block(int p, int q) const;
};

ToyFockModel make_toy_fock(const HPParams& params, double T, int steps);

/// Slice transfer map Y -> (I (x) u(f))^dag M^dag (Y (x) I) M (I (x) u(h)) for
/// slice values a (bra) and c (ket), u(a) = e_0 + sqrt(tau) sum a^n e_n.
SuperOperator slice_transfer(const ToyFockModel& model, const Vector& f_slice,
                             const Vector& h_slice);

/// Composition T_first o ... o T_{first+count-1}; Heisenberg order, so the
/// last slice acts on X first.
SuperOperator transfer_map(const ToyFockModel& model, const CoherentFunction& f,
                           const CoherentFunction& h, int first, int count);

MatrixElementTrace simulate_transfer(const ToyFockModel& model, const Matrix& X,
                                     const CoherentFunction& f, const CoherentFunction& h);

/// RK4 for dPsi/dt = Psi o A(t), Psi_0 = id, with
///   A = fbar.h id + lambda + sum fbar^m lambda^m + sum h^n lambda_n
///       + sum fbar^m h^n (lambda^m_n - delta id).
MatrixElementTrace coherent_form_ode(const FormGenerator& gen, const Matrix& X,
                                     const CoherentFunction& f, const CoherentFunction& h);

/// Per-step RK4 propagators w_k of dW/dt = -(K + sum_m K_m h^m(t)) W, so that
/// W_{k+1} = w_k W_k.
std::vector<Matrix> vector_cocycle_steps(const HPParams& params, const CoherentFunction& h);
VectorCocycleTrace vector_cocycle(const HPParams& params, const CoherentFunction& h);

struct PicardResult {
    MatrixElementTrace trace;
    std::vector<double> increments;   // max |Phi^(j+1) - Phi^(j)| per iteration
    bool non_contraction = false;
};

/// Picard iteration of
///   Phi(t) = E(0,t) W^f_t^dag X W^h_t
///          + sum_{s<t} tau E(0,s) W^f_s^dag J_s(Phi_{[s,t]}) W^h_s
/// with J_s(Y) = sum_i (L^i + f(s).L^i_.)^dag Y (L^i + h(s).L^i_.) - fbar.h Y,
/// E the exponential-vector overlap, and Phi_{[s,t]} the previous iterate on the
/// window starting at s. The first iterate is the W-sandwich alone.
/// `non_contraction` is set when the increment grows three iterations running.
PicardResult picard_solve(const HPParams& params, const Matrix& X, const CoherentFunction& f,
                          const CoherentFunction& h, int iters);

using MatrixElementSolver =
    std::function<Matrix(const Matrix& X, const CoherentFunction& f, const CoherentFunction& h)>;

MatrixElementSolver transfer_solver(const HPParams& params);
MatrixElementSolver ode_solver(const FormGenerator& gen);
MatrixElementSolver picard_solver(const HPParams& params, int iters);

struct GramConfig {
    Eigen::Index n = 2;
    int d = 1;
    int blocks = 3;          // size of [X_kl]
    int psd_rank = 1;        // rows of Y in [X_kl] = Y^dag Y
    int functions = 2;       // coherent functions per configuration
    double amplitude = 1.0;  // |f| bound for the random constant coherent values
    double T = 1.0;
    int steps = 256;
};

struct GramReport {
    double min_eig = 0.0;
    Matrix gram;
    std::vector<Matrix> X_blocks;            // row-major k*blocks + l
    std::vector<CoherentFunction> functions;
};

/// Gram matrix over (k, f) of the final-time matrix elements Phi(f_a, X_kl, f_b)
/// for a seeded PSD operator matrix and seeded coherent functions.
GramReport gram_positivity_check(const MatrixElementSolver& solver, const GramConfig& cfg,
                                 std::uint64_t seed);

/// Max over matrix units of |Phi_{[0,s)} o Phi^s_{[0,r)} - Phi_{[0,s+r)}| in the
/// transfer representation. `shift_fault` misaligns the shifted cocycle's
/// coherent arguments by that many slices.
double cocycle_residual(const ToyFockModel& model, const CoherentFunction& f,
                        const CoherentFunction& h, int s, int r, int shift_fault = 0);

struct MartingaleReport {
    Normalization classification = Normalization::neither;
    std::vector<double> times;
    std::vector<RealVector> eigenvalues;   // of Phi_t(I), ascending
};

MartingaleReport martingale_check(const FormGenerator& gen, double T, int steps,
                                  double tol = 1e-10);

} // namespace qsc
