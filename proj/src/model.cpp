#include "adiageo/model.hpp"

#include <cmath>

#include "adiageo/errors.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

namespace {

void validate_point(const ControlPoint& x, int param_dim) {
    if (x.size() != param_dim)
        throw InvalidModel("control point has dimension " +
                           std::to_string(x.size()) + ", expected " +
                           std::to_string(param_dim));
    if (!x.allFinite())
        throw InvalidModel("control point has non-finite entries");
}

}  // namespace

Matrix HamiltonianModel::evaluate(const ControlPoint& x) const {
    validate_point(x, param_dim_);
    Matrix h = eval_(x);
    if (h.rows() != dim_ || h.cols() != dim_)
        throw InvalidModel("model '" + name_ + "' returned a " +
                           std::to_string(h.rows()) + "x" +
                           std::to_string(h.cols()) + " matrix, expected " +
                           std::to_string(dim_));
    return h;
}

Matrix HamiltonianModel::partial(const ControlPoint& x, int i) const {
    validate_point(x, param_dim_);
    if (i < 0 || i >= param_dim_)
        throw InvalidModel("partial index out of range");
    if (partial_) return partial_(x, i);
    return finite_difference_partial(x, i);
}

Matrix HamiltonianModel::finite_difference_partial(const ControlPoint& x,
                                                   int i, double h) const {
    validate_point(x, param_dim_);
    if (h <= 0.0) h = fd_step_rel_ * std::max(1.0, std::abs(x(i)));
    ControlPoint xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    return (eval_(xp) - eval_(xm)) / (2.0 * h);
}

Matrix HamiltonianModel::directional(const ControlPoint& x,
                                     const Vector& velocity) const {
    if (velocity.size() != param_dim_)
        throw InvalidModel("velocity dimension mismatch");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < param_dim_; ++i)
        if (velocity(i) != 0.0) out += velocity(i) * partial(x, i);
    return out;
}

HamiltonianModel restrict_model(const HamiltonianModel& model,
                                std::function<ControlPoint(double)> curve,
                                std::function<Vector(double)> curve_velocity,
                                const std::string& name) {
    auto eval = [model, curve](const ControlPoint& t) {
        return model.evaluate(curve(t(0)));
    };
    auto partial = [model, curve, curve_velocity](const ControlPoint& t,
                                                  int) {
        return model.directional(curve(t(0)), curve_velocity(t(0)));
    };
    HamiltonianModel out(name, model.dim(), 1, eval, partial);
    out.metadata() = model.metadata();
    return out;
}

HamiltonianModel shift_model(
    const HamiltonianModel& model,
    std::function<double(const ControlPoint&)> shift,
    std::function<Vector(const ControlPoint&)> shift_grad) {
    const Index n = model.dim();
    auto eval = [model, shift, n](const ControlPoint& x) {
        return Matrix(model.evaluate(x) +
                      shift(x) * Matrix::Identity(n, n));
    };
    HamiltonianModel::PartialFn partial;
    if (model.has_analytic_partial() && shift_grad) {
        partial = [model, shift_grad, n](const ControlPoint& x, int i) {
            return Matrix(model.partial(x, i) +
                          shift_grad(x)(i) * Matrix::Identity(n, n));
        };
    }
    HamiltonianModel out(model.name() + "+shift", n, model.param_dim(), eval,
                         partial);
    out.metadata() = model.metadata();
    return out;
}

}  // namespace adiageo
