#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "adiageo/types.hpp"

namespace adiageo {

// A parametrized Hamiltonian family x -> H(x) over an M-dimensional control
// manifold, with partial derivatives dH/dx_i either supplied analytically or
// obtained by central finite differences.
class HamiltonianModel {
  public:
    using EvalFn = std::function<Matrix(const ControlPoint&)>;
    using PartialFn = std::function<Matrix(const ControlPoint&, int)>;

    HamiltonianModel() = default;
    HamiltonianModel(std::string name, Index dim, int param_dim, EvalFn eval,
                     PartialFn partial = nullptr)
        : name_(std::move(name)),
          dim_(dim),
          param_dim_(param_dim),
          eval_(std::move(eval)),
          partial_(std::move(partial)) {}

    const std::string& name() const { return name_; }
    Index dim() const { return dim_; }
    int param_dim() const { return param_dim_; }
    bool has_analytic_partial() const { return static_cast<bool>(partial_); }

    double fd_step_rel() const { return fd_step_rel_; }
    void set_fd_step_rel(double h) { fd_step_rel_ = h; }

    // Validates the control point (size, finiteness) and evaluates H(x).
    Matrix evaluate(const ControlPoint& x) const;

    // dH/dx_i; analytic when available, else central finite difference.
    Matrix partial(const ControlPoint& x, int i) const;

    // Central finite difference regardless of an analytic partial; used as an
    // oracle against the analytic form. h <= 0 selects the default step.
    Matrix finite_difference_partial(const ControlPoint& x, int i,
                                     double h = 0.0) const;

    // dH/ds along a velocity: sum_i dH/dx_i * v_i.
    Matrix directional(const ControlPoint& x, const Vector& velocity) const;

    // Structural metadata (qubit count, overlap, ...) for run records.
    std::map<std::string, double>& metadata() { return metadata_; }
    const std::map<std::string, double>& metadata() const { return metadata_; }

  private:
    std::string name_;
    Index dim_ = 0;
    int param_dim_ = 0;
    EvalFn eval_;
    PartialFn partial_;
    double fd_step_rel_ = 1e-5;
    std::map<std::string, double> metadata_;
};

// One-parameter restriction t -> H(c(t)) with chain-rule partials; used to
// solve geodesics on reduced parametrizations (e.g. x = (1-t, t)).
HamiltonianModel restrict_model(const HamiltonianModel& model,
                                std::function<ControlPoint(double)> curve,
                                std::function<Vector(double)> curve_velocity,
                                const std::string& name);

// H(x) + c(x) * Identity; eigenprojections are invariant under this shift.
HamiltonianModel shift_model(const HamiltonianModel& model,
                             std::function<double(const ControlPoint&)> shift,
                             std::function<Vector(const ControlPoint&)> shift_grad);

}  // namespace adiageo
