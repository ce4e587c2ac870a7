// support.hpp: shared fixtures and independent oracles for the test binaries
//
// Oracles here never call library superoperator machinery; they evaluate maps
// by explicit matrix arithmetic so a bug in the action-matrix layer cannot
// cancel against itself.

#pragma once

#include <cmath>
#include <vector>

#include "qsc/dilation.hpp"
#include "qsc/generator.hpp"
#include "qsc/hp_params.hpp"
#include "qsc/qsde_sim.hpp"

namespace qsc::test {

inline Matrix ket_bra(Eigen::Index n, Eigen::Index i, Eigen::Index j)
{
    Matrix E = Matrix::Zero(n, n);
    E(i, j) = 1.0;
    return E;
}

// Qubit amplitude damping: L = |0><1|, L_1 = I, K = |1><1|/2.
inline HPParams amplitude_damping()
{
    HPParams p;
    p.n = 2;
    p.d = 1;
    p.r = 1;
    p.kraus_L = {ket_bra(2, 0, 1)};
    p.kraus_Lmat = {{Matrix::Identity(2, 2)}};
    p.K = 0.5 * ket_bra(2, 1, 1);
    p.K_row = {Matrix::Zero(2, 2)};
    p.H = Matrix::Zero(2, 2);
    return p;
}

// L = 0, L_m = I on the diagonal: lambda^m_n = delta id, everything else zero.
inline HPParams trivial_exchange(Eigen::Index n = 2, int d = 1)
{
    HPParams p;
    p.n = n;
    p.d = d;
    p.r = d;
    for (int i = 0; i < d; ++i) {
        p.kraus_L.push_back(Matrix::Zero(n, n));
        std::vector<Matrix> row;
        for (int m = 0; m < d; ++m) row.push_back(i == m ? Matrix(Matrix::Identity(n, n)) : Matrix(Matrix::Zero(n, n)));
        p.kraus_Lmat.push_back(row);
        p.K_row.push_back(Matrix::Zero(n, n));
    }
    p.K = Matrix::Zero(n, n);
    p.H = Matrix::Zero(n, n);
    return p;
}

inline SuperOperator transpose_map(Eigen::Index n)
{
    return SuperOperator::from_map(n, n, [](const Matrix& X) { return Matrix(X.transpose()); });
}

// Trivial exchange generator with the diagonal exchange block (m, m) replaced
// by the transpose map.
inline FormGenerator transpose_block_generator(Eigen::Index n = 2, int d = 1, int m = 0)
{
    FormGenerator g = assemble_from_hp(trivial_exchange(n, d));
    g.matrix[m][m] = transpose_map(n);
    return g;
}

// The five non-CCP generators used across the suites.
inline std::vector<FormGenerator> counterexamples()
{
    std::vector<FormGenerator> out;
    out.push_back(transpose_block_generator(2, 1));
    out.push_back(transpose_block_generator(3, 1));
    out.push_back(transpose_block_generator(2, 2, 1));
    FormGenerator neg = assemble_from_hp(trivial_exchange(2, 1));
    neg.matrix[0][0] = cplx(-1.0) * neg.matrix[0][0];
    out.push_back(neg);
    // sign-flipped phi in the scalar block: lambda(X) = -L^dag X L - K^dag X - X K
    HPParams ad = amplitude_damping();
    FormGenerator flip = assemble_from_hp(ad);
    const Matrix L = ad.kraus_L[0];
    flip.scalar = flip.scalar - cplx(2.0) * SuperOperator::sandwich(L.adjoint(), L);
    flip = FormGenerator(flip.scalar, flip.up, flip.down, flip.matrix);
    out.push_back(flip);
    return out;
}

// Seeded battery: n in {2,3}, d in {1,2}, r in 1..4.
inline std::vector<HPParams> battery(int count = 100, std::uint64_t seed = 20240601)
{
    Rng rng(seed);
    std::vector<HPParams> out;
    for (int k = 0; k < count; ++k) {
        const Eigen::Index n = 2 + (k % 2);
        const int d = 1 + (k / 2) % 2;
        const int r = 1 + (k / 4) % 4;
        out.push_back(random_hp_params(n, d, r, rng));
    }
    return out;
}

// Direct evaluation of the four structural maps from HP coefficients.
struct HpOracle {
    const HPParams& p;

    Matrix exchange(int m, int k, const Matrix& X) const
    {
        Matrix Y = Matrix::Zero(p.n, p.n);
        for (int i = 0; i < p.r; ++i) Y += p.kraus_Lmat[i][m].adjoint() * X * p.kraus_Lmat[i][k];
        return Y;
    }
    Matrix up(int m, const Matrix& X) const
    {
        Matrix Y = -p.K_row[m].adjoint() * X;
        for (int i = 0; i < p.r; ++i) Y += p.kraus_Lmat[i][m].adjoint() * X * p.kraus_L[i];
        return Y;
    }
    Matrix down(int k, const Matrix& X) const
    {
        Matrix Y = -X * p.K_row[k];
        for (int i = 0; i < p.r; ++i) Y += p.kraus_L[i].adjoint() * X * p.kraus_Lmat[i][k];
        return Y;
    }
    Matrix scalar(const Matrix& X) const
    {
        Matrix Y = -p.K.adjoint() * X - X * p.K;
        for (int i = 0; i < p.r; ++i) Y += p.kraus_L[i].adjoint() * X * p.kraus_L[i];
        return Y;
    }
};

// exp(A) by scaling and squaring of a degree-30 Taylor polynomial.
inline Matrix taylor_expm(const Matrix& A)
{
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
    const Matrix B = A / std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(A.rows(), A.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * B / double(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

// Heisenberg-picture vacuum expectation via the oracle generator, tabulated
// entry by entry on matrix units.
inline Matrix oracle_semigroup(const HPParams& p, double t, const Matrix& X)
{
    const Eigen::Index n = p.n;
    HpOracle o{p};
    Matrix A(n * n, n * n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index pp = 0; pp < n; ++pp) {
            const Matrix Y = o.scalar(ket_bra(n, pp, q));
            for (Eigen::Index c = 0; c < n; ++c)
                for (Eigen::Index r = 0; r < n; ++r) A(r + n * c, pp + n * q) = Y(r, c);
        }
    }
    const Vector x = Eigen::Map<const Vector>(X.data(), n * n);
    const Vector y = taylor_expm(t * A) * x;
    return Eigen::Map<const Matrix>(y.data(), n, n);
}

} // namespace qsc::test
