// ito_algebra.hpp: Hudson-Parthasarathy structure matrices, the Ito product
// and the flat involution with respect to the indefinite metric G

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qsc/linalg.hpp"

namespace qsc {

/// Noise index layout (-, 1, ..., d, +) mapped to positions 0 .. d+1.
class IndexSet {
public:
    explicit IndexSet(int d);

    int d() const { return d_; }
    int size() const { return d_ + 2; }
    int minus() const { return 0; }
    int plus() const { return d_ + 1; }
    // position of the noise mode m in 1..d
    int mode(int m) const;

private:
    int d_;
};

/// (d+2) x (d+2) array of n x n operators alpha^mu_nu, stored as one dense
/// block matrix: block (mu, nu) is alpha^mu_nu. Row "+" and column "-" are zero.
class StructureMatrix {
public:
    StructureMatrix(Eigen::Index n, int d);

    static StructureMatrix zero(Eigen::Index n, int d) { return {n, d}; }
    // Matrix unit in the index slots (mu, nu) with operator coefficient c.
    static StructureMatrix unit(int mu, int nu, const Matrix& c, int d);
    static StructureMatrix from_blocks(Matrix blocks, Eigen::Index n, int d);

    Eigen::Index n() const { return n_; }
    int d() const { return index_.d(); }
    const IndexSet& index() const { return index_; }

    auto entry(int mu, int nu) { return blocks_.block(mu * n_, nu * n_, n_, n_); }
    auto entry(int mu, int nu) const { return blocks_.block(mu * n_, nu * n_, n_, n_); }

    const Matrix& blocks() const { return blocks_; }

    // max abs over the row "+" and the column "-"
    double admissibility_residual() const;
    bool admissible(double tol = 0.0) const { return admissibility_residual() <= tol; }

private:
    Eigen::Index n_;
    IndexSet index_;
    Matrix blocks_;
};

/// G = [[0,0,I],[0,I_k,0],[I,0,D]] on h + K + h with dim h = n, dim K = k.
class PseudoMetric {
public:
    PseudoMetric(Matrix D, Eigen::Index k);

    Eigen::Index n() const { return D_.rows(); }
    Eigen::Index k() const { return k_; }
    Eigen::Index dim() const { return 2 * n() + k_; }
    const Matrix& D() const { return D_; }

    Matrix G() const;
    // closed form [[-D,0,I],[0,I_k,0],[I,0,0]]
    Matrix G_inv() const;

    // X^flat = G^-1 X^dag G for an operator on the full space
    Matrix flat(const Matrix& X) const;

private:
    Matrix D_;
    Eigen::Index k_;
};

StructureMatrix ito_product(const StructureMatrix& beta, const StructureMatrix& gamma);

/// Pseudo-Hermitian conjugation alpha -> G^-1 alpha^dag G. The metric's middle
/// block must have size d*n. Throws ContractViolation for non-Hermitian D.
StructureMatrix flat(const StructureMatrix& alpha, const PseudoMetric& g);

/// Index-reflection form of the flat map: (alpha^flat)^mu_nu = (alpha^{-nu}_{-mu})^dag
/// with - and + swapped. Agrees with flat() when D = 0.
StructureMatrix reflect_flat(const StructureMatrix& alpha);

double metric_roundtrip(const PseudoMetric& g);

struct IndexQuadruple {
    int mu, beta, gamma, nu;
    bool operator==(const IndexQuadruple&) const = default;
};

struct ItoTableReport {
    int d = 0;
    long checked = 0;
    std::vector<IndexQuadruple> violations;
    bool passed() const { return violations.empty(); }
};

/// Exhaustive check of dA^beta_mu dA^nu_gamma = delta^beta_gamma dA^nu_mu on
/// integer matrix units. `fault` flips the Kronecker delta of one product, for
/// exercising the reporting path.
ItoTableReport verify_ito_table(int d, std::optional<IndexQuadruple> fault = std::nullopt);

} // namespace qsc
