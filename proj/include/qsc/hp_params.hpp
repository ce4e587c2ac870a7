// hp_params.hpp: Hudson-Parthasarathy coefficients (K, K_n, H, L^i, L^i_n)

#pragma once

#include <vector>

#include "qsc/linalg.hpp"

namespace qsc {

/// Coefficients of the flow
///   dF + K F dt = sum (L^i_n - delta I) F dA^n_i + sum L^i F dA^+_i - sum K_n F dA^n_-
/// with multiplicity r (number of Kraus channels) and noise dimension d.
/// K is authoritative for assembly; H records its anti-Hermitian part.
struct HPParams {
    Eigen::Index n = 0;
    int d = 0;
    int r = 0;
    Matrix K;
    std::vector<Matrix> K_row;                    // d entries, K_n
    Matrix H;
    std::vector<Matrix> kraus_L;                  // r entries, L^i
    std::vector<std::vector<Matrix>> kraus_Lmat;  // r x d, L^i_n

    // Shape checks plus H = H^dag; throws ShapeError / ContractViolation.
    void validate(double herm_tol = 1e-10) const;

    // sum_i L^i^dag L^i
    Matrix kraus_gram() const;
    // D = sum_i L^i^dag L^i - K - K^dag, the value of the scalar block at I
    Matrix drift() const;
    // |H - (K - K^dag)/2i|
    double gauge_mismatch() const;
};

/// K = (sum L^dag L - D_target)/2 + iH, so that the assembled scalar block maps
/// I to D_target.
HPParams make_hp_params(std::vector<Matrix> kraus_L,
                        std::vector<std::vector<Matrix>> kraus_Lmat,
                        std::vector<Matrix> K_row,
                        const Matrix& H,
                        const Matrix& D_target);

/// Seeded random martingale parameters: L^i_n = delta I + scale*G, L^i and
/// K_n Gaussian with the given scale, K = (sum L^dag L)/2 + iH.
HPParams random_hp_params(Eigen::Index n, int d, int r, Rng& rng, double scale = 0.5);

} // namespace qsc
