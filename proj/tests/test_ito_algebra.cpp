// test_ito_algebra.cpp: structure matrices, the Ito product and the flat map

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qsc/ito_algebra.hpp"

using namespace qsc;

namespace {

StructureMatrix random_admissible(Rng& rng, Eigen::Index n, int d)
{
    StructureMatrix s(n, d);
    const IndexSet idx(d);
    for (int mu = 0; mu < idx.plus(); ++mu)
        for (int nu = 1; nu < idx.size(); ++nu) s.entry(mu, nu) = random_matrix(rng, n, n);
    return s;
}

// Block product written out index by index.
Matrix block_product_oracle(const StructureMatrix& a, const StructureMatrix& b)
{
    const Eigen::Index n = a.n();
    const int s = a.index().size();
    Matrix out = Matrix::Zero(s * n, s * n);
    for (int mu = 0; mu < s; ++mu)
        for (int nu = 0; nu < s; ++nu)
            for (int k = 0; k < s; ++k)
                out.block(mu * n, nu * n, n, n) += Matrix(a.entry(mu, k)) * Matrix(b.entry(k, nu));
    return out;
}

} // namespace

TEST_CASE("index layout puts - first and + last")
{
    const IndexSet idx(3);
    CHECK(idx.size() == 5);
    CHECK(idx.minus() == 0);
    CHECK(idx.plus() == 4);
    CHECK(idx.mode(1) == 1);
    CHECK(idx.mode(3) == 3);
    CHECK_THROWS_AS(IndexSet(0), ContractViolation);
}

TEST_CASE("creation times annihilation gives the time increment")
{
    const Matrix I = Matrix::Identity(2, 2);
    const StructureMatrix beta = StructureMatrix::unit(0, 1, I, 1);
    const StructureMatrix gamma = StructureMatrix::unit(1, 2, I, 1);
    const StructureMatrix prod = ito_product(beta, gamma);
    const StructureMatrix dt = StructureMatrix::unit(0, 2, I, 1);
    CHECK(max_abs(prod.blocks() - dt.blocks()) == 0.0);
}

TEST_CASE("dt annihilates everything")
{
    Rng rng(5);
    const StructureMatrix dt = StructureMatrix::unit(0, 3, Matrix::Identity(2, 2), 2);
    for (int t = 0; t < 10; ++t) {
        const StructureMatrix g = random_admissible(rng, 2, 2);
        CHECK(max_abs(ito_product(dt, g).blocks()) == 0.0);
        CHECK(max_abs(ito_product(g, dt).blocks()) == 0.0);
    }
}

TEST_CASE("Ito product matches the block oracle, is associative and keeps admissibility")
{
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const StructureMatrix a = random_admissible(rng, 2, 2);
        const StructureMatrix b = random_admissible(rng, 2, 2);
        const StructureMatrix c = random_admissible(rng, 2, 2);
        CHECK(max_abs(ito_product(a, b).blocks() - block_product_oracle(a, b)) <= 1e-13);
        const Matrix left = ito_product(ito_product(a, b), c).blocks();
        const Matrix right = ito_product(a, ito_product(b, c)).blocks();
        CHECK(max_abs(left - right) <= 1e-12);
        CHECK(ito_product(a, b).admissible());
    }
    CHECK_THROWS_AS(ito_product(StructureMatrix(2, 1), StructureMatrix(3, 1)), ShapeError);
    CHECK_THROWS_AS(ito_product(StructureMatrix(2, 1), StructureMatrix(2, 2)), ShapeError);
}

TEST_CASE("Ito table holds exactly for d = 1, 2, 3")
{
    for (int d = 1; d <= 3; ++d) {
        const ItoTableReport rep = verify_ito_table(d);
        CHECK(rep.passed());
        CHECK(rep.checked > 0);
    }
}

TEST_CASE("a flipped Kronecker delta is reported as exactly that quadruple")
{
    const IndexQuadruple q{0, 1, 1, 2};
    const ItoTableReport rep = verify_ito_table(2, q);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations.front() == q);
}

TEST_CASE("metric inverse is exact in closed form")
{
    CHECK(metric_roundtrip(PseudoMetric(Matrix::Zero(1, 1), 1)) == 0.0);
    CHECK(metric_roundtrip(PseudoMetric(-Matrix::Identity(2, 2), 4)) <= 1e-15);
    Matrix D = Matrix::Zero(2, 2);
    D(1, 1) = -2.0;
    const PseudoMetric g(D, 2);
    CHECK(metric_roundtrip(g) <= 1e-15);
    CHECK(max_abs(g.G() - g.G().adjoint()) == 0.0);
    CHECK(max_abs(g.G() * g.G_inv() - Matrix::Identity(6, 6)) <= 1e-15);
}

TEST_CASE("flat of zero is zero and fixes the dt slot up to conjugation")
{
    const PseudoMetric g(Matrix::Zero(2, 2), 2);
    CHECK(max_abs(flat(StructureMatrix(2, 1), g).blocks()) == 0.0);

    const cplx c(0.3, -1.7);
    const StructureMatrix a = StructureMatrix::unit(0, 2, Matrix::Constant(1, 1, c), 1);
    const StructureMatrix fa = flat(a, PseudoMetric(Matrix::Zero(1, 1), 1));
    Matrix expect = Matrix::Zero(3, 3);
    expect(0, 2) = std::conj(c);
    CHECK(max_abs(fa.blocks() - expect) == 0.0);
}

TEST_CASE("flat exchanges creation and annihilation")
{
    const Matrix A = Matrix::Identity(2, 2) * cplx(0.0, 2.0);
    const PseudoMetric g(Matrix::Zero(2, 2), 2);
    // dA^+_1 with coefficient A goes to dA^1_- with coefficient A^dag
    const StructureMatrix up = StructureMatrix::unit(1, 2, A, 1);
    const StructureMatrix down = StructureMatrix::unit(0, 1, A.adjoint(), 1);
    CHECK(max_abs(flat(up, g).blocks() - down.blocks()) == 0.0);
}

TEST_CASE("flat is an involutive anti-homomorphism for Hermitian D")
{
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        const PseudoMetric g(random_hermitian(rng, 2), 4);
        const StructureMatrix a = random_admissible(rng, 2, 2);
        const StructureMatrix b = random_admissible(rng, 2, 2);
        CHECK(max_abs(flat(flat(a, g), g).blocks() - a.blocks()) <= 1e-12);
        const Matrix lhs = flat(ito_product(a, b), g).blocks();
        const Matrix rhs = ito_product(flat(b, g), flat(a, g)).blocks();
        CHECK(max_abs(lhs - rhs) <= 1e-12);
        CHECK(flat(a, g).admissible());
        // metric form and index reflection agree on admissible matrices
        CHECK(max_abs(flat(a, g).blocks() - reflect_flat(a).blocks()) <= 1e-12);
    }
}

TEST_CASE("flat rejects a non-Hermitian corner and mismatched metrics")
{
    Matrix D = Matrix::Zero(2, 2);
    D(0, 1) = 1.0;
    CHECK_THROWS_AS(flat(StructureMatrix(2, 1), PseudoMetric(D, 2)), ContractViolation);
    CHECK_THROWS_AS(flat(StructureMatrix(2, 2), PseudoMetric(Matrix::Zero(2, 2), 2)), ShapeError);
}
