// hp_params.cpp

#include "qsc/hp_params.hpp"

namespace qsc {

namespace {

void require_square(const Matrix& A, Eigen::Index n, const char* what)
{
    if (A.rows() != n || A.cols() != n) {
        throw ShapeError(std::string("HPParams: ") + what + " must be n x n");
    }
}

} // namespace

void HPParams::validate(double herm_tol) const
{
    if (n < 1 || d < 1 || r < 1) {
        throw ShapeError("HPParams: n, d and r must all be >= 1");
    }
    require_square(K, n, "K");
    require_square(H, n, "H");
    if (static_cast<int>(K_row.size()) != d) {
        throw ShapeError("HPParams: K_row must have d entries");
    }
    for (const auto& Kn : K_row) require_square(Kn, n, "K_n");
    if (static_cast<int>(kraus_L.size()) != r || static_cast<int>(kraus_Lmat.size()) != r) {
        throw ShapeError("HPParams: Kraus families must have r entries");
    }
    for (int i = 0; i < r; ++i) {
        require_square(kraus_L[i], n, "L^i");
        if (static_cast<int>(kraus_Lmat[i].size()) != d) {
            throw ShapeError("HPParams: each kraus_Lmat row must have d entries");
        }
        for (const auto& Lin : kraus_Lmat[i]) require_square(Lin, n, "L^i_n");
    }
    if (!is_hermitian(H, herm_tol)) {
        throw ContractViolation("HPParams: H is not Hermitian");
    }
}

Matrix HPParams::kraus_gram() const
{
    Matrix S = Matrix::Zero(n, n);
    for (const auto& L : kraus_L) S += L.adjoint() * L;
    return S;
}

Matrix HPParams::drift() const
{
    return kraus_gram() - K - K.adjoint();
}

double HPParams::gauge_mismatch() const
{
    return max_abs(H - (K - K.adjoint()) / (2.0 * I_unit));
}

HPParams make_hp_params(std::vector<Matrix> kraus_L,
                        std::vector<std::vector<Matrix>> kraus_Lmat,
                        std::vector<Matrix> K_row,
                        const Matrix& H,
                        const Matrix& D_target)
{
    HPParams p;
    p.n = H.rows();
    p.d = static_cast<int>(K_row.size());
    p.r = static_cast<int>(kraus_L.size());
    p.kraus_L = std::move(kraus_L);
    p.kraus_Lmat = std::move(kraus_Lmat);
    p.K_row = std::move(K_row);
    p.H = H;
    p.K = Matrix::Zero(p.n, p.n);
    p.validate();
    require_square(D_target, p.n, "D");
    p.K = 0.5 * (p.kraus_gram() - D_target) + I_unit * H;
    return p;
}

HPParams random_hp_params(Eigen::Index n, int d, int r, Rng& rng, double scale)
{
    std::vector<Matrix> L;
    std::vector<std::vector<Matrix>> Lmat;
    std::vector<Matrix> K_row;
    for (int i = 0; i < r; ++i) {
        L.push_back(random_matrix(rng, n, n, scale));
        std::vector<Matrix> row;
        for (int m = 0; m < d; ++m) {
            Matrix Lin = random_matrix(rng, n, n, scale);
            if (i == m) Lin += Matrix::Identity(n, n);
            row.push_back(std::move(Lin));
        }
        Lmat.push_back(std::move(row));
    }
    for (int m = 0; m < d; ++m) K_row.push_back(random_matrix(rng, n, n, scale));
    const Matrix H = random_hermitian(rng, n, scale);
    return make_hp_params(std::move(L), std::move(Lmat), std::move(K_row), H,
                          Matrix::Zero(n, n));
}

} // namespace qsc
