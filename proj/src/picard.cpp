// picard.cpp: Picard iteration of the integral equation built on the vector
// cocycle V_t
//
// For a window [a, b) of slices, the form-level equation reads
//   Phi[a][b] = Z[a][b] + R[a][b],
//   Z[a][b]   = e_a w^f_a^dag Z[a+1][b] w^h_a,                  Z[b][b] = X
//   R[a][b]   = tau J_a(Phi[a][b]) + e_a w^f_a^dag R[a+1][b] w^h_a, R[b][b] = 0
// where e_a is the exponential-vector overlap and w the per-step propagators of
// W. Windows ending at b only couple to other windows ending at b, so columns
// are processed in chunks with all superoperators applied as action matrices.

#include "qsc/qsde_sim.hpp"

#include <algorithm>
#include <cmath>

namespace qsc {

namespace {

constexpr int kChunk = 64;

} // namespace

PicardResult picard_solve(const HPParams& params, const Matrix& X, const CoherentFunction& f,
                          const CoherentFunction& h, int iters)
{
    params.validate();
    if (iters < 1) {
        throw ContractViolation("picard_solve: iters must be >= 1");
    }
    if (!f.same_grid(h)) {
        throw GridMismatch("coherent functions f and h live on different grids");
    }
    if (f.d() != params.d) {
        throw GridMismatch("coherent function dimension does not match the noise dimension");
    }
    const Eigen::Index n = params.n;
    if (X.rows() != n || X.cols() != n) {
        throw ShapeError("picard_solve: observable must be n x n");
    }
    const int N = f.steps();
    const double tau = f.tau();
    const Eigen::Index n2 = n * n;

    const auto wf = vector_cocycle_steps(params, f);
    const auto wh = vector_cocycle_steps(params, h);

    // Per-slice sandwich S_a(Y) = e_a wf^dag Y wh and jump J_a.
    std::vector<Matrix> S(N), J(N);
    for (int a = 0; a < N; ++a) {
        const Vector fa = f.slice(a);
        const Vector ha = h.slice(a);
        const cplx overlap = fa.dot(ha);
        S[a] = std::exp(tau * overlap) * kron(wh[a].transpose(), wf[a].adjoint());
        Matrix Ja = -overlap * Matrix::Identity(n2, n2);
        for (int i = 0; i < params.r; ++i) {
            Matrix Af = params.kraus_L[i];
            Matrix Ah = params.kraus_L[i];
            for (int m = 0; m < params.d; ++m) {
                Af += fa(m) * params.kraus_Lmat[i][m];
                Ah += ha(m) * params.kraus_Lmat[i][m];
            }
            Ja += kron(Ah.transpose(), Af.adjoint());
        }
        J[a] = tau * Ja;
    }

    const Vector x = vec(X);
    PicardResult result;
    result.increments.assign(iters, 0.0);
    result.trace.times.resize(N + 1);
    result.trace.values.resize(N + 1);
    for (int b = 0; b <= N; ++b) result.trace.times[b] = b * tau;
    result.trace.values[0] = X;

    for (int b0 = 1; b0 <= N; b0 += kChunk) {
        const int b1 = std::min(N, b0 + kChunk - 1);
        const int C = b1 - b0 + 1;
        // Column c holds the window ending at b0 + c; rows a = 0 .. b1.
        std::vector<Matrix> Z(b1 + 1), cur(b1 + 1), next(b1 + 1);
        const Matrix xs = x.replicate(1, C);
        Z[b1] = xs;
        for (int a = b1 - 1; a >= 0; --a) {
            const int c0 = std::max(0, a - b0 + 1);   // columns with b > a
            Z[a] = xs;
            Z[a].rightCols(C - c0) = S[a] * Z[a + 1].rightCols(C - c0);
        }
        cur = Z;

        Matrix R(n2, C);
        for (int j = 0; j < iters; ++j) {
            R.setZero();
            next[b1] = xs;
            double inc = 0.0;
            for (int a = b1 - 1; a >= 0; --a) {
                const int c0 = std::max(0, a - b0 + 1);
                const int w = C - c0;
                R.rightCols(w) = J[a] * cur[a].rightCols(w) + S[a] * R.rightCols(w);
                next[a] = xs;
                next[a].rightCols(w) = Z[a].rightCols(w) + R.rightCols(w);
                inc = std::max(inc, (next[a] - cur[a]).cwiseAbs().maxCoeff());
            }
            std::swap(cur, next);
            result.increments[j] = std::max(result.increments[j], inc);
        }
        for (int c = 0; c < C; ++c) {
            result.trace.values[b0 + c] = unvec(cur[0].col(c), n);
        }
    }

    // Growth below the round-off floor is noise, not divergence.
    const double floor = 1e-12 * std::max(1.0, max_abs(X));
    int growth = 0;
    for (int j = 1; j < iters; ++j) {
        const double prev = result.increments[j - 1];
        const double now = result.increments[j];
        growth = (now > prev && now > floor) ? growth + 1 : 0;
        if (growth >= 3) {
            result.non_contraction = true;
            break;
        }
    }
    return result;
}

} // namespace qsc
