// test_qsde_sim.cpp: semigroup, transfer chain, coherent-form ODE, Picard
// iteration and the positivity, cocycle and normalization checks

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support.hpp"

using namespace qsc;
using test::ket_bra;

namespace {

const Matrix I2 = Matrix::Identity(2, 2);

CoherentFunction random_function(Rng& rng, int d, double T, int steps, double amp = 1.0)
{
    CoherentFunction f(d, T, steps);
    std::uniform_real_distribution<double> u(-amp, amp);
    for (int k = 0; k < steps; ++k)
        for (int m = 0; m < d; ++m) f.set(k, m, cplx(u(rng), u(rng)));
    return f;
}

// Piecewise-constant function that is smooth in t, so refining the grid keeps
// the same limit: sampled at slice midpoints from a fixed profile.
CoherentFunction profile(int d, double T, int steps)
{
    CoherentFunction f(d, T, steps);
    const double tau = T / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = (k + 0.5) * tau;
        for (int m = 0; m < d; ++m) f.set(k, m, cplx(0.5 * std::cos(t + m), 0.3 * std::sin(2.0 * t)));
    }
    return f;
}

} // namespace

TEST_CASE("semigroup_expm: identity at t = 0, exact decay, oracle agreement")
{
    const HPParams ad = test::amplitude_damping();
    const FormGenerator gad = assemble_from_hp(ad);
    const Matrix P1 = ket_bra(2, 1, 1);
    CHECK(max_abs(semigroup_expm(gad, 0.0, P1) - P1) == 0.0);
    const Matrix e1 = semigroup_expm(gad, 1.0, P1);
    CHECK(e1(1, 1).real() == doctest::Approx(0.36787944117144233).epsilon(1e-12));
    CHECK(std::abs(e1(0, 0)) <= 1e-14);
    CHECK(max_abs(semigroup_expm(gad, 3.0, I2) - I2) <= 1e-12);
    // coherence decays at half the rate
    CHECK(std::abs(semigroup_expm(gad, 1.0, ket_bra(2, 0, 1))(0, 1) - std::exp(-0.5)) <= 1e-12);
    CHECK_THROWS_AS(semigroup_expm(gad, -1.0, P1), ContractViolation);

    Rng rng(21);
    for (const auto& p : test::battery(20, 3)) {
        const Matrix X = random_matrix(rng, p.n, p.n);
        const FormGenerator gen = assemble_from_hp(p);
        CHECK(max_abs(semigroup_expm(gen, 0.7, X) - test::oracle_semigroup(p, 0.7, X)) <= 1e-11);
    }
}

TEST_CASE("transfer chain: vacuum amplitude damping converges at first order")
{
    const HPParams ad = test::amplitude_damping();
    const Matrix P1 = ket_bra(2, 1, 1);
    const Matrix exact = semigroup_expm(assemble_from_hp(ad), 1.0, P1);
    auto err = [&](int N) {
        const auto f = CoherentFunction::vacuum(1, 1.0, N);
        return max_abs(simulate_transfer(make_toy_fock(ad, 1.0, N), P1, f, f).final() - exact);
    };
    const double e256 = err(256);
    CHECK(e256 <= 5e-3);
    const double ratio = err(512) / e256;
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
}

TEST_CASE("transfer chain: trivial exchange multiplies by the slice overlaps")
{
    const HPParams p = test::trivial_exchange();
    Rng rng(8);
    const int N = 16;
    const auto f = random_function(rng, 1, 1.0, N);
    const auto h = random_function(rng, 1, 1.0, N);
    const Matrix X = random_matrix(rng, 2, 2);
    const MatrixElementTrace tr = simulate_transfer(make_toy_fock(p, 1.0, N), X, f, h);
    cplx prod = 1.0;
    for (int k = 0; k < N; ++k) prod *= 1.0 + f.tau() * std::conj(f.at(k, 0)) * h.at(k, 0);
    CHECK(max_abs(tr.final() - prod * X) <= 1e-13);
    CHECK(tr.values.size() == static_cast<std::size_t>(N + 1));
    CHECK(max_abs(tr.values.front() - X) == 0.0);
}

TEST_CASE("slice transfer maps are completely positive on the diagonal and preserve adjoints")
{
    Rng rng(9);
    for (const auto& p : test::battery(10, 10)) {
        const ToyFockModel m = make_toy_fock(p, 1.0, 32);
        Vector a(p.d);
        for (int k = 0; k < p.d; ++k) a(k) = cplx(rng() % 5 / 2.0 - 1.0, 0.5);
        const SuperOperator t = slice_transfer(m, a, a);
        CHECK(min_hermitian_eigenvalue(t.choi()) >= -1e-12);
        const Matrix X = random_hermitian(rng, p.n);
        const Matrix Y = t(X);
        CHECK(max_abs(Y - Y.adjoint()) <= 1e-13);
    }
}

TEST_CASE("coherent-form ODE: vacuum matches expm, trivial exchange is a pure phase")
{
    const HPParams ad = test::amplitude_damping();
    const FormGenerator gad = assemble_from_hp(ad);
    const Matrix P1 = ket_bra(2, 1, 1);
    const auto vac = CoherentFunction::vacuum(1, 1.0, 256);
    CHECK(max_abs(coherent_form_ode(gad, P1, vac, vac).final() - semigroup_expm(gad, 1.0, P1)) <= 1e-8);

    Rng rng(14);
    const int N = 64;
    const auto f = random_function(rng, 1, 1.0, N);
    const auto h = random_function(rng, 1, 1.0, N);
    const Matrix X = random_matrix(rng, 2, 2);
    // RK4 on a scalar ODE z' = a z advances by the degree-4 Taylor polynomial
    cplx rk4 = 1.0, integral = 0.0;
    for (int k = 0; k < N; ++k) {
        const cplx z = f.tau() * std::conj(f.at(k, 0)) * h.at(k, 0);
        rk4 *= 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        integral += z;
    }
    const Matrix got = coherent_form_ode(assemble_from_hp(test::trivial_exchange()), X, f, h).final();
    CHECK(max_abs(got - rk4 * X) <= 1e-13);
    CHECK(max_abs(got - std::exp(integral) * X) <= 1e-9);
}

TEST_CASE("transfer and ODE agree on amplitude damping with f = h = 1")
{
    const HPParams ad = test::amplitude_damping();
    const int N = 512;
    const auto f = CoherentFunction::constant(1, 1.0, N, 1.0);
    const Matrix P1 = ket_bra(2, 1, 1);
    const Matrix a = simulate_transfer(make_toy_fock(ad, 1.0, N), P1, f, f).final();
    const Matrix b = coherent_form_ode(assemble_from_hp(ad), P1, f, f).final();
    CHECK(max_abs(a - b) <= 5e-3);
}

TEST_CASE("Picard iteration: zero coefficients, vacuum decay and coherent agreement")
{
    HPParams zero = test::trivial_exchange();
    zero.kraus_Lmat[0][0].setZero();
    Rng rng(15);
    const Matrix X = random_matrix(rng, 2, 2);
    const auto vac = CoherentFunction::vacuum(1, 1.0, 32);
    const PicardResult z = picard_solve(zero, X, vac, vac, 5);
    CHECK(max_abs(z.trace.final() - X) <= 1e-14);
    CHECK_FALSE(z.non_contraction);

    const HPParams ad = test::amplitude_damping();
    const FormGenerator gad = assemble_from_hp(ad);
    const Matrix P1 = ket_bra(2, 1, 1);
    const auto v256 = CoherentFunction::vacuum(1, 1.0, 256);
    CHECK(max_abs(picard_solve(ad, P1, v256, v256, 25).trace.final() - semigroup_expm(gad, 1.0, P1)) <= 5e-3);

    const int N = 512;
    const auto f = CoherentFunction::constant(1, 1.0, N, 1.0);
    const Matrix Y = random_hermitian(rng, 2);
    const PicardResult c = picard_solve(ad, Y, f, f, 30);
    CHECK_FALSE(c.non_contraction);
    CHECK(max_abs(c.trace.final() - coherent_form_ode(gad, Y, f, f).final()) <= 1e-2);
    CHECK(c.increments.back() <= 1e-10);
    CHECK_THROWS_AS(picard_solve(ad, Y, f, f, 0), ContractViolation);
}

TEST_CASE("Picard flags a run whose increments keep growing")
{
    Rng rng(5);
    const HPParams p = random_hp_params(2, 2, 2, rng, 2.0);
    const auto f = CoherentFunction::constant(2, 4.0, 16, 2.0);
    const PicardResult res = picard_solve(p, Matrix::Identity(2, 2), f, f, 8);
    CHECK(res.non_contraction);
}

TEST_CASE("solvers converge at first order to a common limit on battery parameters")
{
    const auto bat = test::battery(6, 61);
    for (const auto& p : bat) {
        const FormGenerator gen = assemble_from_hp(p);
        const Matrix X = ket_bra(p.n, 0, p.n - 1) + ket_bra(p.n, p.n - 1, 0);
        const auto fine = profile(p.d, 1.0, 1024);
        const Matrix ref = coherent_form_ode(gen, X, fine, fine).final();
        auto err_transfer = [&](int N) {
            const auto f = profile(p.d, 1.0, N);
            return max_abs(simulate_transfer(make_toy_fock(p, 1.0, N), X, f, f).final() - ref);
        };
        auto err_picard = [&](int N) {
            const auto f = profile(p.d, 1.0, N);
            const PicardResult res = picard_solve(p, X, f, f, 30);
            REQUIRE_FALSE(res.non_contraction);
            return max_abs(res.trace.final() - ref);
        };
        const double t64 = err_transfer(64), t128 = err_transfer(128), t256 = err_transfer(256);
        CHECK(0.5 * std::log2(t64 / t256) >= 0.9);
        CHECK(t128 < t64);
        const double p64 = err_picard(64), p256 = err_picard(256);
        CHECK(0.5 * std::log2(p64 / p256) >= 0.9);
    }
}

TEST_CASE("vector cocycle without noise couplings is exp(-Kt)")
{
    HPParams p = test::amplitude_damping();
    p.K(0, 1) = cplx(0.2, 0.1);
    const auto h = CoherentFunction::constant(1, 1.0, 64, cplx(0.7, -0.4));
    const VectorCocycleTrace tr = vector_cocycle(p, h);
    CHECK(max_abs(tr.W.front() - I2) == 0.0);
    CHECK(max_abs(tr.W.back() - test::taylor_expm(-p.K)) <= 1e-10);
    CHECK(vector_cocycle_steps(p, h).size() == 64);
}

TEST_CASE("Gram positivity: accepted generators pass, the transpose block fails")
{
    GramConfig cfg;
    cfg.steps = 256;
    CHECK(gram_positivity_check(transfer_solver(test::amplitude_damping()), cfg, 1).min_eig >= -1e-6);

    GramConfig bad;
    bad.amplitude = 2.0;
    bad.steps = 128;
    int negative = 0;
    for (int s = 0; s < 5; ++s)
        negative += gram_positivity_check(ode_solver(test::transpose_block_generator()), bad, 40 + s).min_eig < -1e-6;
    CHECK(negative > 0);

    GramConfig empty;
    empty.blocks = 0;
    CHECK_THROWS_AS(gram_positivity_check(transfer_solver(test::amplitude_damping()), empty, 1), ContractViolation);
}

TEST_CASE("discrete cocycle identity and shift-fault detection")
{
    const HPParams ad = test::amplitude_damping();
    const ToyFockModel m = make_toy_fock(ad, 1.0, 32);
    const auto vac = CoherentFunction::vacuum(1, 1.0, 32);
    CHECK(cocycle_residual(m, vac, vac, 0, 32) <= 1e-15);
    CHECK(cocycle_residual(m, vac, vac, 16, 16) <= 1e-13);

    Rng rng(33);
    const HPParams p = test::battery(1, 71).front();
    const ToyFockModel mp = make_toy_fock(p, 1.0, 32);
    const auto f = random_function(rng, p.d, 1.0, 32);
    const auto h = random_function(rng, p.d, 1.0, 32);
    CHECK(cocycle_residual(mp, f, h, 12, 20) <= 1e-12);
    CHECK(cocycle_residual(mp, f, h, 12, 20, 1) > 1e-6);
    CHECK_THROWS_AS(cocycle_residual(mp, f, h, 20, 20), ShapeError);
}

TEST_CASE("martingale check classifies the three drift regimes")
{
    const HPParams ad = test::amplitude_damping();
    CHECK(martingale_check(assemble_from_hp(ad), 1.0, 16).classification == Normalization::martingale);

    HPParams sub = ad;
    sub.K += 0.25 * I2;
    const MartingaleReport rep = martingale_check(assemble_from_hp(sub), 2.0, 8);
    CHECK(rep.classification == Normalization::submartingale);
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        const double expect = std::exp(-0.5 * rep.times[k]);
        CHECK(std::abs(rep.eigenvalues[k](0) - expect) <= 1e-12);
        CHECK(std::abs(rep.eigenvalues[k](1) - expect) <= 1e-12);
    }

    HPParams up = ad;
    up.K -= 0.25 * I2;
    CHECK(martingale_check(assemble_from_hp(up), 1.0, 8).classification == Normalization::neither);
    CHECK_THROWS_AS(martingale_check(assemble_from_hp(ad), 0.0, 8), ContractViolation);
}

TEST_CASE("coherent functions: construction errors, shifts and grid checks")
{
    CHECK_THROWS_AS(CoherentFunction(0, 1.0, 4), ShapeError);
    CHECK_THROWS_AS(CoherentFunction(1, 0.0, 4), ContractViolation);
    Matrix bad = Matrix::Zero(4, 1);
    bad(2, 0) = std::nan("");
    CHECK_THROWS_AS(CoherentFunction(1.0, bad), ContractViolation);

    Rng rng(2);
    const auto f = random_function(rng, 2, 1.0, 8);
    const auto g = f.shifted(3, 4);
    CHECK(g.steps() == 4);
    CHECK(g.tau() == doctest::Approx(f.tau()));
    CHECK(g.at(0, 1) == f.at(3, 1));
    CHECK(f.at(8, 0) == cplx(0.0));

    const HPParams ad = test::amplitude_damping();
    const auto a = CoherentFunction::vacuum(1, 1.0, 16);
    const auto b = CoherentFunction::vacuum(1, 1.0, 32);
    const auto two = CoherentFunction::vacuum(2, 1.0, 16);
    CHECK_FALSE(a.same_grid(b));
    CHECK_THROWS_AS(coherent_form_ode(assemble_from_hp(ad), I2, a, b), GridMismatch);
    CHECK_THROWS_AS(simulate_transfer(make_toy_fock(ad, 1.0, 16), I2, b, b), GridMismatch);
    CHECK_THROWS_AS(picard_solve(ad, I2, two, two, 3), GridMismatch);
}
