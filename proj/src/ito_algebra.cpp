// ito_algebra.cpp: structure matrices, Ito product, flat involution

#include "qsc/ito_algebra.hpp"

namespace qsc {

IndexSet::IndexSet(int d) : d_(d)
{
    if (d < 1) {
        throw ContractViolation("IndexSet: noise dimension d must be >= 1");
    }
}

int IndexSet::mode(int m) const
{
    if (m < 1 || m > d_) {
        throw ShapeError("IndexSet: noise mode out of range");
    }
    return m;
}

StructureMatrix::StructureMatrix(Eigen::Index n, int d)
    : n_(n), index_(d), blocks_(Matrix::Zero((d + 2) * n, (d + 2) * n))
{
    if (n < 1) {
        throw ShapeError("StructureMatrix: system dimension must be >= 1");
    }
}

StructureMatrix StructureMatrix::unit(int mu, int nu, const Matrix& c, int d)
{
    if (c.rows() != c.cols()) {
        throw ShapeError("StructureMatrix::unit: coefficient must be square");
    }
    StructureMatrix s(c.rows(), d);
    if (mu < 0 || nu < 0 || mu >= s.index().size() || nu >= s.index().size()) {
        throw ShapeError("StructureMatrix::unit: index out of range");
    }
    s.entry(mu, nu) = c;
    return s;
}

StructureMatrix StructureMatrix::from_blocks(Matrix blocks, Eigen::Index n, int d)
{
    StructureMatrix s(n, d);
    if (blocks.rows() != s.blocks_.rows() || blocks.cols() != s.blocks_.cols()) {
        throw ShapeError("StructureMatrix::from_blocks: expected a (d+2)n square matrix");
    }
    s.blocks_ = std::move(blocks);
    return s;
}

double StructureMatrix::admissibility_residual() const
{
    const Eigen::Index full = blocks_.rows();
    const Eigen::Index plus = index_.plus() * n_;
    const double row = max_abs(blocks_.block(plus, 0, n_, full));
    const double col = max_abs(blocks_.block(0, 0, full, n_));
    return std::max(row, col);
}

PseudoMetric::PseudoMetric(Matrix D, Eigen::Index k) : D_(std::move(D)), k_(k)
{
    if (D_.rows() != D_.cols() || D_.rows() < 1) {
        throw ShapeError("PseudoMetric: D must be a nonempty square matrix");
    }
    if (k < 0) {
        throw ShapeError("PseudoMetric: middle dimension must be >= 0");
    }
}

Matrix PseudoMetric::G() const
{
    const Eigen::Index n = this->n();
    Matrix G = Matrix::Zero(dim(), dim());
    G.block(0, n + k_, n, n).setIdentity();
    G.block(n, n, k_, k_).setIdentity();
    G.block(n + k_, 0, n, n).setIdentity();
    G.block(n + k_, n + k_, n, n) = D_;
    return G;
}

Matrix PseudoMetric::G_inv() const
{
    const Eigen::Index n = this->n();
    Matrix Gi = Matrix::Zero(dim(), dim());
    Gi.block(0, 0, n, n) = -D_;
    Gi.block(0, n + k_, n, n).setIdentity();
    Gi.block(n, n, k_, k_).setIdentity();
    Gi.block(n + k_, 0, n, n).setIdentity();
    return Gi;
}

Matrix PseudoMetric::flat(const Matrix& X) const
{
    if (X.rows() != dim() || X.cols() != dim()) {
        throw ShapeError("PseudoMetric::flat: operator does not act on h + K + h");
    }
    return G_inv() * X.adjoint() * G();
}

StructureMatrix ito_product(const StructureMatrix& beta, const StructureMatrix& gamma)
{
    if (beta.n() != gamma.n() || beta.d() != gamma.d()) {
        throw ShapeError("ito_product: structure matrices differ in n or d");
    }
    return StructureMatrix::from_blocks(beta.blocks() * gamma.blocks(), beta.n(), beta.d());
}

StructureMatrix flat(const StructureMatrix& alpha, const PseudoMetric& g)
{
    if (!is_hermitian(g.D(), 1e-12)) {
        throw ContractViolation("flat: metric corner D must be Hermitian");
    }
    if (g.n() != alpha.n() || g.k() != alpha.d() * alpha.n()) {
        throw ShapeError("flat: metric is not compatible with the structure matrix");
    }
    return StructureMatrix::from_blocks(g.flat(alpha.blocks()), alpha.n(), alpha.d());
}

StructureMatrix reflect_flat(const StructureMatrix& alpha)
{
    const IndexSet& idx = alpha.index();
    auto reflect = [&](int pos) {
        if (pos == idx.minus()) return idx.plus();
        if (pos == idx.plus()) return idx.minus();
        return pos;
    };
    StructureMatrix out(alpha.n(), alpha.d());
    for (int mu = 0; mu < idx.size(); ++mu) {
        for (int nu = 0; nu < idx.size(); ++nu) {
            out.entry(mu, nu) = alpha.entry(reflect(nu), reflect(mu)).adjoint();
        }
    }
    return out;
}

double metric_roundtrip(const PseudoMetric& g)
{
    const Matrix prod = g.G() * g.G_inv();
    return max_abs(prod - Matrix::Identity(g.dim(), g.dim()));
}

ItoTableReport verify_ito_table(int d, std::optional<IndexQuadruple> fault)
{
    const IndexSet idx(d);
    const int size = idx.size();
    using IntMatrix = Eigen::MatrixXi;
    auto unit = [size](int r, int c) {
        IntMatrix E = IntMatrix::Zero(size, size);
        E(r, c) = 1;
        return E;
    };

    ItoTableReport report;
    report.d = d;
    // dA^beta_mu carries a unit at (row mu, column beta): mu in {-,1..d},
    // beta in {1..d,+}.
    for (int mu = idx.minus(); mu <= d; ++mu) {
        for (int beta = 1; beta <= idx.plus(); ++beta) {
            for (int gamma = idx.minus(); gamma <= d; ++gamma) {
                for (int nu = 1; nu <= idx.plus(); ++nu) {
                    const IndexQuadruple q{mu, beta, gamma, nu};
                    IntMatrix product = unit(mu, beta) * unit(gamma, nu);
                    if (fault && *fault == q) {
                        product = (beta == gamma) ? IntMatrix::Zero(size, size) : unit(mu, nu);
                    }
                    const IntMatrix expected =
                        (beta == gamma) ? unit(mu, nu) : IntMatrix::Zero(size, size);
                    ++report.checked;
                    if (product != expected) {
                        report.violations.push_back(q);
                    }
                }
            }
        }
    }
    return report;
}

} // namespace qsc
