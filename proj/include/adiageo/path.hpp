#pragma once

#include <functional>
#include <vector>

#include "adiageo/types.hpp"

namespace adiageo {

// A discretized schedule s in [0,1] -> x(s) with velocities. Paths built from
// an analytic sampler evaluate it directly; paths built from knots use C^1
// monotone cubic Hermite interpolation between them.
class Path {
  public:
    // sampler(s, x, v) fills position and velocity at rescaled time s.
    using Sampler = std::function<void(double, Vector&, Vector&)>;

    Path() = default;

    static Path from_sampler(int param_dim, Sampler sampler, int knots = 129);
    static Path from_knots(std::vector<double> s, std::vector<Vector> x,
                           std::vector<Vector> v);
    static Path line(const Vector& x0, const Vector& x1, int knots = 129);

    // One-parameter path from a scalar schedule t(s) mapped through a curve.
    static Path scalar_schedule(std::function<double(double)> t_of_s,
                                std::function<Vector(double)> curve,
                                std::function<Vector(double)> curve_velocity,
                                int knots = 257);

    int param_dim() const { return param_dim_; }
    int knot_count() const { return static_cast<int>(s_.size()); }
    const std::vector<double>& knots_s() const { return s_; }
    const std::vector<Vector>& knots_x() const { return x_; }
    const std::vector<Vector>& knots_v() const { return v_; }

    const Vector& start() const { return x_.front(); }
    const Vector& end() const { return x_.back(); }

    void eval(double s, Vector& x, Vector& v) const;
    Vector position(double s) const;

    // Same geometric curve, reparametrized by a monotone map u(s),
    // u(0)=0, u(1)=1.
    Path reparametrized(std::function<double(double)> u,
                        std::function<double(double)> du, int knots) const;

  private:
    int param_dim_ = 0;
    std::vector<double> s_;
    std::vector<Vector> x_;
    std::vector<Vector> v_;
    Sampler sampler_;
};

}  // namespace adiageo
