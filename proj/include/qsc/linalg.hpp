// linalg.hpp: dense complex types, column-stacking vec, and superoperators

#pragma once

#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qsc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

// Error hierarchy. Everything derives from std::runtime_error so callers that
// only care about failure can catch one type.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotCompletelyPositive : std::runtime_error {
    NotCompletelyPositive(const std::string& what, double eig)
        : std::runtime_error(what), eigenvalue(eig) {}
    double eigenvalue;
};

struct ResidualTooLarge : std::runtime_error {
    ResidualTooLarge(const std::string& what, double res, std::string where)
        : std::runtime_error(what), residual(res), location(std::move(where)) {}
    double residual;
    std::string location;
};

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// vec(X)[i + n*j] = X(i, j)
Vector vec(const Matrix& X);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);
Matrix unvec(const Vector& v, Eigen::Index n);

Matrix kron(const Matrix& A, const Matrix& B);

// E_pq = |p><q| of size n x n
Matrix matrix_unit(Eigen::Index n, Eigen::Index p, Eigen::Index q);

double max_abs(const Matrix& A);

bool is_hermitian(const Matrix& A, double tol);
Matrix hermitize(const Matrix& A);

// Smallest eigenvalue of the Hermitian part of A.
double min_hermitian_eigenvalue(const Matrix& A);

/// Linear map M_n -> M_m stored as an m^2 x n^2 action matrix on column-stacked
/// inputs.
struct SuperOperator {
    Eigen::Index in_dim = 0;
    Eigen::Index out_dim = 0;
    Matrix action;

    SuperOperator() = default;
    SuperOperator(Eigen::Index in, Eigen::Index out, Matrix act);

    static SuperOperator zero(Eigen::Index n, Eigen::Index m);
    static SuperOperator zero(Eigen::Index n) { return zero(n, n); }
    static SuperOperator identity(Eigen::Index n);
    // X -> A X B
    static SuperOperator sandwich(const Matrix& A, const Matrix& B);
    // Tabulates an arbitrary linear map on the matrix-unit basis.
    static SuperOperator from_map(Eigen::Index n, Eigen::Index m,
                                  const std::function<Matrix(const Matrix&)>& fn);

    Matrix apply(const Matrix& X) const;
    Matrix operator()(const Matrix& X) const { return apply(X); }

    // S*(X) = S(X^dag)^dag
    SuperOperator adjoint_map() const;

    // max over matrix units of |S(E^dag) - S(E)^dag|
    double hermiticity_residual() const;
    bool preserves_hermiticity(double tol) const { return hermiticity_residual() <= tol; }

    // Choi matrix sum_pq E_pq (x) S(E_pq), with the input index outermost.
    Matrix choi() const;

    SuperOperator& operator+=(const SuperOperator& other);
    SuperOperator& operator-=(const SuperOperator& other);
    SuperOperator& operator*=(cplx s);
};

SuperOperator operator+(SuperOperator a, const SuperOperator& b);
SuperOperator operator-(SuperOperator a, const SuperOperator& b);
SuperOperator operator*(cplx s, SuperOperator a);
// (a o b)(X) = a(b(X))
SuperOperator compose(const SuperOperator& a, const SuperOperator& b);

// Seeded Gaussian helpers; all randomness in the library flows through these.
using Rng = std::mt19937_64;
Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
Matrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0);
Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0);

} // namespace qsc
