// semigroup.cpp: coherent functions and the vacuum semigroup exp(t lambda)

#include "qsc/qsde_sim.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qsc {

CoherentFunction::CoherentFunction(int d, double T, int steps)
    : T_(T), values_(Matrix::Zero(std::max(steps, 0), std::max(d, 0)))
{
    if (d < 1 || steps < 1) {
        throw ShapeError("CoherentFunction: need d >= 1 and at least one step");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ContractViolation("CoherentFunction: horizon must be positive and finite");
    }
}

CoherentFunction::CoherentFunction(double T, Matrix values) : T_(T), values_(std::move(values))
{
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw ShapeError("CoherentFunction: need d >= 1 and at least one step");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ContractViolation("CoherentFunction: horizon must be positive and finite");
    }
    if (!values_.allFinite()) {
        throw ContractViolation("CoherentFunction: values must be finite");
    }
}

CoherentFunction CoherentFunction::vacuum(int d, double T, int steps)
{
    return {d, T, steps};
}

CoherentFunction CoherentFunction::constant(int d, double T, int steps, cplx value)
{
    CoherentFunction f(d, T, steps);
    f.values_.setConstant(value);
    return f;
}

cplx CoherentFunction::at(int k, int m) const
{
    if (k < 0 || k >= steps() || m < 0 || m >= d()) return 0.0;
    return values_(k, m);
}

Vector CoherentFunction::slice(int k) const
{
    if (k < 0 || k >= steps()) return Vector::Zero(d());
    return values_.row(k).transpose();
}

CoherentFunction CoherentFunction::shifted(int s, int count) const
{
    Matrix vals = Matrix::Zero(count, d());
    for (int k = 0; k < count; ++k) {
        for (int m = 0; m < d(); ++m) vals(k, m) = at(s + k, m);
    }
    return {tau() * count, std::move(vals)};
}

bool CoherentFunction::same_grid(const CoherentFunction& other) const
{
    return other.steps() == steps() && other.d() == d() &&
           std::abs(other.T_ - T_) <= 1e-12 * std::max(1.0, T_);
}

Matrix semigroup_expm(const FormGenerator& gen, double t, const Matrix& X)
{
    if (t < 0.0) {
        throw ContractViolation("semigroup_expm: t must be >= 0");
    }
    if (t == 0.0) return X;
    const Matrix propagator = (t * gen.scalar.action).exp();
    return unvec(propagator * vec(X), gen.n);
}

} // namespace qsc
