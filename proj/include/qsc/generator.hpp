// generator.hpp: stochastic form-generators, the dissipator kernel and the
// conditional complete positivity test

#pragma once

#include <cstdint>
#include <vector>

#include "qsc/hp_params.hpp"
#include "qsc/linalg.hpp"

namespace qsc {

/// Block superoperator
///     [ lambda      lambda_n   ]
///     [ lambda^m    lambda^m_n ]
/// on M_n, with lambda^m_n = delta^m_n id + alpha^m_n. `D` caches lambda(I).
struct FormGenerator {
    Eigen::Index n = 0;
    int d = 0;
    SuperOperator scalar;                             // lambda = alpha^-_+
    std::vector<SuperOperator> up;                    // lambda^m = alpha^m_+
    std::vector<SuperOperator> down;                  // lambda_n = alpha^-_n
    std::vector<std::vector<SuperOperator>> matrix;   // lambda^m_n, [m][n]
    Matrix D;

    FormGenerator() = default;
    // Checks shapes and recomputes D. Does not enforce the flat symmetry.
    FormGenerator(SuperOperator scalar, std::vector<SuperOperator> up,
                  std::vector<SuperOperator> down,
                  std::vector<std::vector<SuperOperator>> matrix);

    static FormGenerator zero(Eigen::Index n, int d);

    // Max over matrix units of the three symmetry defects
    //   lambda(X^dag) - lambda(X)^dag, lambda^n(X^dag) - lambda_n(X)^dag,
    //   lambda^m_n(X^dag) - lambda^n_m(X)^dag.
    double flat_symmetry_residual() const;

    // Largest block difference against another generator of the same shape.
    double block_distance(const FormGenerator& other) const;

    // The exchange blocks as one map M_n -> M_{nd}, X -> [lambda^m_n(X)]_{m,n}.
    SuperOperator exchange_map() const;
};

enum class Normalization { martingale, submartingale, neither };
const char* to_string(Normalization c);

/// Classifies by D = lambda(I): D = 0, D <= 0, or otherwise.
Normalization classify_drift(const Matrix& D, double tol = 1e-10);

/// lambda^m_n(X) = sum_i L^i_m^dag X L^i_n
/// lambda^m(X)   = sum_i L^i_m^dag X L^i - K_m^dag X
/// lambda_n(X)   = sum_i L^i^dag X L^i_n - X K_n
/// lambda(X)     = sum_i L^i^dag X L^i - K^dag X - X K
FormGenerator assemble_from_hp(const HPParams& params);

/// lambda as an n^2 x n^2 action matrix: the generator of the vacuum semigroup.
SuperOperator semigroup_generator(const FormGenerator& gen);

/// Sesquilinear kernel over the matrix-unit basis E_a (row-major, a = p*n + q).
/// Row/column index ((a*(d+1) + mu)*n + i): slot mu = 0 carries the shared
/// eta^- = eta^+ component, mu = m >= 1 the noise components.
struct Dissipator {
    Eigen::Index n = 0;
    int d = 0;
    Matrix kernel;

    Eigen::Index basis_size() const { return n * n; }
    Eigen::Index slot(Eigen::Index a, int mu, Eigen::Index i) const
    {
        return (a * (d + 1) + mu) * n + i;
    }
    double hermiticity_residual() const { return max_abs(kernel - kernel.adjoint()); }
};

// Kernels above this many rows are refused.
inline constexpr Eigen::Index kMaxKernelRows = 10000;

/// Throws ContractViolation when the generator fails the flat symmetry.
Dissipator build_dissipator(const FormGenerator& gen, double symmetry_tol = 1e-10);

struct WitnessTerm {
    Matrix X;       // basis operator E_a
    Vector eta;     // n*(d+1) components, slot 0 first
};

struct CcpVerdict {
    bool accepted = false;
    double min_eig = 0.0;
    double max_abs_eig = 0.0;
    double threshold = 0.0;
    std::vector<WitnessTerm> witness;   // filled on rejection
};

/// Accepted iff the smallest kernel eigenvalue is >= -tol * max(1, |largest|).
CcpVerdict check_conditionally_cp(const FormGenerator& gen, double tol = 1e-9);

struct SampledFamily {
    std::vector<Matrix> X;
    std::vector<Vector> eta;   // n*(d+1) each, slot 0 first
};

struct SamplingReport {
    int trials = 0;
    double min_value = 0.0;           // normalized quadratic form
    SampledFamily worst;
};

/// Monte Carlo check of conditional positivity: random families with the
/// constraint sum_k X_k eta_k^+ = 0 (last eta solved from the others).
SamplingReport sample_conditional_positivity(const FormGenerator& gen, int trials,
                                             std::uint64_t seed);

/// Quadratic form sum_{k,l} sum_{mu,nu} <eta_k^mu | lambda^mu_nu(X_k^dag X_l) eta_l^nu>.
cplx conditional_form(const FormGenerator& gen, const SampledFamily& family);

} // namespace qsc
