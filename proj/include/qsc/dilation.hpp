// dilation.hpp: Hudson-Parthasarathy parameter extraction, the pre-Hilbert
// dilation (j, k, k*, l) and the pseudo-Hilbert flat-representation jhat

#pragma once

#include <string>
#include <vector>

#include "qsc/generator.hpp"
#include "qsc/hp_params.hpp"
#include "qsc/ito_algebra.hpp"

namespace qsc {

struct ExchangeKraus {
    int r = 0;
    std::vector<std::vector<Matrix>> Lmat;   // r x d, L^i_n
    RealVector choi_eigenvalues;             // ascending, full spectrum
    double reconstruction_residual = 0.0;
};

/// Kraus decomposition of X -> [lambda^m_n(X)] via its Choi matrix. Eigenvalues
/// below tol * max are dropped; anything below -tol * max throws
/// NotCompletelyPositive.
ExchangeKraus kraus_from_exchange_block(const FormGenerator& gen, double tol = 1e-9);

struct Extraction {
    HPParams params;
    int rank = 0;
    double block_residual = 0.0;
};

/// Recovers (K, K_n, H, L^i, L^i_n) from a generator over the full M_n.
///  1. L^i_n from the exchange block Choi matrix;
///  2. L^i and K_m^dag as the minimal-norm least-squares solution of
///     lambda^m(E) = sum_i L^i_m^dag E L^i - K_m^dag E over matrix units E;
///  3. K + K^dag = sum_i L^i^dag L^i - lambda(I);
///  4. traceless Hermitian H from lambda(X) - phi(X) + K^dag X + X K = 0;
///  5. reassembly, throwing ResidualTooLarge above residual_tol.
/// Parameters are unique only up to gauge; compare generators, not parameters.
Extraction extract_hp_params(const FormGenerator& gen, double tol = 1e-9,
                             double residual_tol = 1e-8);

struct PreHilbertReport {
    double j_multiplicative = 0.0;   // j(X^dag Z) - j(X)^dag j(Z)
    double j_unital = 0.0;
    double k_derivation = 0.0;       // k(X^dag Z) - j(X)^dag k(Z) - k(X^dag) Z
    double kstar_derivation = 0.0;   // k*(X^dag Z) - X^dag k*(Z) - k*(X^dag) j(Z)
    double l_identity = 0.0;         // l(X^dag Z) - X^dag l(Z) - l(X^dag) Z - k*(X^dag) k(Z)
    double l_adjoint = 0.0;          // l(X^dag)^dag - l(X) - [D, X]
    double max() const;
};

/// Multiplicity space C^n (x) C^r laid out as r stacked copies of h, so that
/// j(X) = blockdiag(X, ..., X).
class PreHilbertDilation {
public:
    PreHilbertDilation(const HPParams& params, Matrix D);

    Eigen::Index n() const { return n_; }
    int d() const { return d_; }
    int r() const { return r_; }
    Eigen::Index kspace_dim() const { return n_ * r_; }

    const Matrix& Lop() const { return Lop_; }                   // nr x n
    const std::vector<Matrix>& Lcirc() const { return Lcirc_; }  // d of nr x n
    const std::vector<Matrix>& Lminus() const { return Lminus_; }// d of n x n
    const Matrix& D() const { return D_; }
    const Matrix& H() const { return H_; }

    Matrix j(const Matrix& X) const;       // nr x nr
    Matrix k(const Matrix& X) const;       // nr x n, j(X)L - LX
    Matrix kstar(const Matrix& X) const;   // n x nr, L^dag j(X) - X L^dag
    Matrix l(const Matrix& X) const;       // n x n

    // Residuals of the representation and derivation identities over all
    // matrix-unit pairs.
    PreHilbertReport verify() const;

private:
    Eigen::Index n_;
    int d_;
    int r_;
    Matrix Lop_;
    std::vector<Matrix> Lcirc_;
    std::vector<Matrix> Lminus_;
    Matrix D_;
    Matrix H_;
};

/// Lminus_n = lambda_n(I) = L^dag L_n - K_n. Throws ContractViolation for
/// non-Hermitian H or D.
PreHilbertDilation build_pre_hilbert(const HPParams& params, const Matrix& D);

/// Full (1+d)n x (1+d)n block value [[lambda, lambda_n], [lambda^m, lambda^m_n]](X).
Matrix bold_lambda(const FormGenerator& gen, const Matrix& X);

struct PseudoDilationReport {
    double multiplicativity = 0.0;   // jhat(X^dag Z) - jhat(X)^flat jhat(Z)
    double unital = 0.0;
    double lflat_consistency = 0.0;  // Lflat - Lbold^dag G
    double reconstruction = 0.0;     // Lflat jhat(X) Lbold - bold lambda(X)
    std::string worst_element;       // basis element of the largest reconstruction defect
    double max() const;
};

class PseudoDilation {
public:
    PseudoDilation(const PreHilbertDilation& pre);

    const PseudoMetric& metric() const { return metric_; }
    const Matrix& Lbold() const { return Lbold_; }   // (2n + nr) x (1+d)n
    const Matrix& Lflat() const { return Lflat_; }   // (1+d)n x (2n + nr)

    // [[X, k*(X), l(X)], [0, j(X), k(X)], [0, 0, X]] on h + K + h
    Matrix jhat(const Matrix& X) const;

    PseudoDilationReport verify(const FormGenerator& gen) const;

private:
    PreHilbertDilation pre_;
    PseudoMetric metric_;
    Matrix Lbold_;
    Matrix Lflat_;
};

struct PseudoDilationResult {
    PseudoDilation dilation;
    PseudoDilationReport report;
};

/// Throws ResidualTooLarge naming the offending basis element when any
/// identity fails by more than tol.
PseudoDilationResult build_pseudo_dilation(const PreHilbertDilation& pre,
                                           const FormGenerator& gen, double tol = 1e-9);

} // namespace qsc
