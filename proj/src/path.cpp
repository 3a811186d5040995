#include "adiageo/path.hpp"

#include <algorithm>
#include <cmath>

#include "adiageo/errors.hpp"

namespace adiageo {

Path Path::from_sampler(int param_dim, Sampler sampler, int knots) {
    if (knots < 2) throw InvalidModel("path needs at least 2 knots");
    Path p;
    p.param_dim_ = param_dim;
    p.sampler_ = std::move(sampler);
    p.s_.resize(static_cast<size_t>(knots));
    p.x_.resize(static_cast<size_t>(knots));
    p.v_.resize(static_cast<size_t>(knots));
    for (int k = 0; k < knots; ++k) {
        const double s = static_cast<double>(k) / (knots - 1);
        p.s_[static_cast<size_t>(k)] = s;
        Vector x(param_dim), v(param_dim);
        p.sampler_(s, x, v);
        p.x_[static_cast<size_t>(k)] = x;
        p.v_[static_cast<size_t>(k)] = v;
    }
    return p;
}

Path Path::from_knots(std::vector<double> s, std::vector<Vector> x,
                      std::vector<Vector> v) {
    if (s.size() < 2 || s.size() != x.size() || s.size() != v.size())
        throw InvalidModel("inconsistent knot arrays");
    for (size_t k = 0; k + 1 < s.size(); ++k)
        if (!(s[k] < s[k + 1]))
            throw InvalidModel("knot parameter must be strictly increasing");
    Path p;
    p.param_dim_ = static_cast<int>(x.front().size());
    p.s_ = std::move(s);
    p.x_ = std::move(x);
    p.v_ = std::move(v);
    return p;
}

Path Path::line(const Vector& x0, const Vector& x1, int knots) {
    Vector d = x1 - x0;
    return from_sampler(
        static_cast<int>(x0.size()),
        [x0, d](double s, Vector& x, Vector& v) {
            x = x0 + s * d;
            v = d;
        },
        knots);
}

Path Path::scalar_schedule(std::function<double(double)> t_of_s,
                           std::function<Vector(double)> curve,
                           std::function<Vector(double)> curve_velocity,
                           int knots) {
    Vector probe = curve(t_of_s(0.0));
    const int dim = static_cast<int>(probe.size());
    auto sampler = [t_of_s, curve, curve_velocity](double s, Vector& x,
                                                   Vector& v) {
        const double t = t_of_s(s);
        const double h = 1e-6;
        const double sl = std::max(0.0, s - h), sr = std::min(1.0, s + h);
        const double dt = (t_of_s(sr) - t_of_s(sl)) / (sr - sl);
        x = curve(t);
        v = curve_velocity(t) * dt;
    };
    return from_sampler(dim, sampler, knots);
}

void Path::eval(double s, Vector& x, Vector& v) const {
    if (sampler_) {
        x.resize(param_dim_);
        v.resize(param_dim_);
        sampler_(s, x, v);
        return;
    }
    s = std::clamp(s, s_.front(), s_.back());
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    size_t k = it == s_.begin() ? 0 : static_cast<size_t>(it - s_.begin()) - 1;
    if (k + 1 >= s_.size()) k = s_.size() - 2;
    const double h = s_[k + 1] - s_[k];
    const double t = (s - s_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    x = h00 * x_[k] + h10 * h * v_[k] + h01 * x_[k + 1] + h11 * h * v_[k + 1];
    const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
    v = d00 * x_[k] + d10 * v_[k] + d01 * x_[k + 1] + d11 * v_[k + 1];
}

Vector Path::position(double s) const {
    Vector x(param_dim_), v(param_dim_);
    eval(s, x, v);
    return x;
}

Path Path::reparametrized(std::function<double(double)> u,
                          std::function<double(double)> du, int knots) const {
    Path base = *this;
    auto sampler = [base, u, du](double s, Vector& x, Vector& v) {
        base.eval(u(s), x, v);
        v *= du(s);
    };
    return from_sampler(param_dim_, sampler, knots);
}

}  // namespace adiageo
