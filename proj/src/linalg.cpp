// linalg.cpp: vec/unvec, Kronecker products and the SuperOperator container

#include "qsc/linalg.hpp"

#include <algorithm>

namespace qsc {

Vector vec(const Matrix& X)
{
    return Eigen::Map<const Vector>(X.data(), X.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols)
{
    if (v.size() != rows * cols) {
        throw ShapeError("unvec: vector length does not match requested shape");
    }
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix unvec(const Vector& v, Eigen::Index n)
{
    return unvec(v, n, n);
}

Matrix kron(const Matrix& A, const Matrix& B)
{
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

Matrix matrix_unit(Eigen::Index n, Eigen::Index p, Eigen::Index q)
{
    Matrix E = Matrix::Zero(n, n);
    E(p, q) = 1.0;
    return E;
}

double max_abs(const Matrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& A, double tol)
{
    return A.rows() == A.cols() && max_abs(A - A.adjoint()) <= tol;
}

Matrix hermitize(const Matrix& A)
{
    return 0.5 * (A + A.adjoint());
}

double min_hermitian_eigenvalue(const Matrix& A)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

SuperOperator::SuperOperator(Eigen::Index in, Eigen::Index out, Matrix act)
    : in_dim(in), out_dim(out), action(std::move(act))
{
    if (action.rows() != out * out || action.cols() != in * in) {
        throw ShapeError("SuperOperator: action matrix must be out^2 x in^2");
    }
}

SuperOperator SuperOperator::zero(Eigen::Index n, Eigen::Index m)
{
    return {n, m, Matrix::Zero(m * m, n * n)};
}

SuperOperator SuperOperator::identity(Eigen::Index n)
{
    return {n, n, Matrix::Identity(n * n, n * n)};
}

SuperOperator SuperOperator::sandwich(const Matrix& A, const Matrix& B)
{
    // vec(A X B) = (B^T (x) A) vec(X)
    if (A.cols() != B.rows()) {
        throw ShapeError("sandwich: inner dimensions differ");
    }
    if (A.rows() != B.cols()) {
        throw ShapeError("sandwich: only square outputs are supported");
    }
    return {A.cols(), A.rows(), kron(B.transpose(), A)};
}

SuperOperator SuperOperator::from_map(Eigen::Index n, Eigen::Index m,
                                      const std::function<Matrix(const Matrix&)>& fn)
{
    Matrix act(m * m, n * n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index p = 0; p < n; ++p) {
            const Matrix Y = fn(matrix_unit(n, p, q));
            if (Y.rows() != m || Y.cols() != m) {
                throw ShapeError("from_map: map returned a matrix of the wrong shape");
            }
            act.col(p + n * q) = vec(Y);
        }
    }
    return {n, m, std::move(act)};
}

Matrix SuperOperator::apply(const Matrix& X) const
{
    if (X.rows() != in_dim || X.cols() != in_dim) {
        throw ShapeError("SuperOperator::apply: input has the wrong shape");
    }
    return unvec(action * vec(X), out_dim);
}

SuperOperator SuperOperator::adjoint_map() const
{
    return from_map(in_dim, out_dim,
                    [this](const Matrix& X) -> Matrix { return apply(X.adjoint()).adjoint(); });
}

double SuperOperator::hermiticity_residual() const
{
    return max_abs(adjoint_map().action - action);
}

Matrix SuperOperator::choi() const
{
    const Eigen::Index n = in_dim;
    const Eigen::Index m = out_dim;
    Matrix C = Matrix::Zero(n * m, n * m);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) {
            C.block(p * m, q * m, m, m) = apply(matrix_unit(n, p, q));
        }
    }
    return C;
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& other)
{
    if (other.in_dim != in_dim || other.out_dim != out_dim) {
        throw ShapeError("SuperOperator: dimension mismatch in sum");
    }
    action += other.action;
    return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& other)
{
    if (other.in_dim != in_dim || other.out_dim != out_dim) {
        throw ShapeError("SuperOperator: dimension mismatch in difference");
    }
    action -= other.action;
    return *this;
}

SuperOperator& SuperOperator::operator*=(cplx s)
{
    action *= s;
    return *this;
}

SuperOperator operator+(SuperOperator a, const SuperOperator& b)
{
    a += b;
    return a;
}

SuperOperator operator-(SuperOperator a, const SuperOperator& b)
{
    a -= b;
    return a;
}

SuperOperator operator*(cplx s, SuperOperator a)
{
    a *= s;
    return a;
}

SuperOperator compose(const SuperOperator& a, const SuperOperator& b)
{
    if (a.in_dim != b.out_dim) {
        throw ShapeError("compose: dimension mismatch");
    }
    return {b.in_dim, a.out_dim, a.action * b.action};
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            A(i, j) = scale * cplx(re, im) / std::sqrt(2.0);
        }
    }
    return A;
}

Matrix random_hermitian(Rng& rng, Eigen::Index n, double scale)
{
    return hermitize(random_matrix(rng, n, n, scale));
}

Vector random_vector(Rng& rng, Eigen::Index n, double scale)
{
    return random_matrix(rng, n, 1, scale).col(0);
}

} // namespace qsc
