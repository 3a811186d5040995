#include "adiageo/geodesic.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>

#include "adiageo/errors.hpp"
#include "adiageo/metric.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

MetricField metric_field_of(const HamiltonianModel& model, double gap_floor) {
    return [model, gap_floor](const ControlPoint& x) {
        return metric_tensor(model, x, gap_floor);
    };
}

ChristoffelField christoffel(const MetricField& metric, const ControlPoint& x,
                             double fd_step, double condition_limit) {
    const int m = static_cast<int>(x.size());
    const RealMatrix g = metric(x);

    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    const double lam_min = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(lam_min > 0.0) || lam_max / lam_min > condition_limit)
        throw SingularMetric(
            "metric is singular or ill-conditioned; solve in a reduced "
            "parametrization");
    const RealMatrix g_inv = g.inverse();

    // dg[k](l,j) = d g_lj / d x_k by central differences
    std::vector<RealMatrix> dg(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        ControlPoint xp = x, xm = x;
        const double h = fd_step * std::max(1.0, std::abs(x(k)));
        xp(k) += h;
        xm(k) -= h;
        dg[static_cast<size_t>(k)] = (metric(xp) - metric(xm)) / (2.0 * h);
    }

    ChristoffelField out;
    out.x = x;
    out.gamma.assign(static_cast<size_t>(m), RealMatrix::Zero(m, m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = j; k < m; ++k) {
                double sum = 0.0;
                for (int l = 0; l < m; ++l)
                    sum += g_inv(i, l) *
                           (dg[static_cast<size_t>(k)](l, j) +
                            dg[static_cast<size_t>(j)](l, k) -
                            dg[static_cast<size_t>(l)](j, k));
                out.gamma[static_cast<size_t>(i)](j, k) = 0.5 * sum;
                out.gamma[static_cast<size_t>(i)](k, j) = 0.5 * sum;
            }
    return out;
}

namespace {

Vector acceleration(const MetricField& metric, const Vector& x,
                    const Vector& u, double fd_step, double cond_limit) {
    ChristoffelField gamma = christoffel(metric, x, fd_step, cond_limit);
    const int m = static_cast<int>(x.size());
    Vector a(m);
    for (int i = 0; i < m; ++i)
        a(i) = -u.dot(gamma.gamma[static_cast<size_t>(i)] * u);
    return a;
}

void integrate_el(const MetricField& metric, const Vector& x0,
                  const Vector& v0, int mesh, double fd_step,
                  double cond_limit, std::vector<Vector>& xs,
                  std::vector<Vector>& us) {
    const int steps = mesh - 1;
    const double h = 1.0 / steps;
    xs.assign(static_cast<size_t>(mesh), Vector());
    us.assign(static_cast<size_t>(mesh), Vector());
    Vector x = x0, u = v0;
    xs[0] = x;
    us[0] = u;
    for (int k = 0; k < steps; ++k) {
        auto acc = [&](const Vector& xx, const Vector& uu) {
            return acceleration(metric, xx, uu, fd_step, cond_limit);
        };
        const Vector k1x = u, k1u = acc(x, u);
        const Vector k2x = u + 0.5 * h * k1u,
                     k2u = acc(x + 0.5 * h * k1x, u + 0.5 * h * k1u);
        const Vector k3x = u + 0.5 * h * k2u,
                     k3u = acc(x + 0.5 * h * k2x, u + 0.5 * h * k2u);
        const Vector k4x = u + h * k3u, k4u = acc(x + h * k3x, u + h * k3u);
        x += (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x);
        u += (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u);
        xs[static_cast<size_t>(k + 1)] = x;
        us[static_cast<size_t>(k + 1)] = u;
    }
}

Path path_from_mesh(const std::vector<Vector>& xs,
                    const std::vector<Vector>& us) {
    std::vector<double> s(xs.size());
    for (size_t k = 0; k < xs.size(); ++k)
        s[k] = static_cast<double>(k) / (xs.size() - 1);
    return Path::from_knots(s, xs, us);
}

// Single shooting on xdot(0) with a damped Newton iteration. Returns true on
// a boundary miss below tol; initial_velocity is used as the starting guess
// and left at the accepted value.
bool shooting_solve(const MetricField& metric, const ControlPoint& x0,
                    const ControlPoint& x1, const GeodesicOptions& opts,
                    Vector& initial_velocity, std::vector<Vector>& xs,
                    std::vector<Vector>& us) {
    const int m = static_cast<int>(x0.size());
    Vector v = initial_velocity;

    // A trial trajectory may wander out of the metric's valid region; such
    // trials count as infinitely bad rather than aborting the solve.
    auto boundary_miss = [&](const Vector& v_try) -> std::optional<Vector> {
        try {
            integrate_el(metric, x0, v_try, opts.mesh, opts.fd_step,
                         opts.condition_limit, xs, us);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (!xs.back().allFinite()) return std::nullopt;
        return Vector(xs.back() - x1);
    };

    const double scale = std::max(1.0, (x1 - x0).norm());
    const double accept = std::max(opts.boundary_tol, 1e-12) * scale;
    std::optional<Vector> miss = boundary_miss(v);
    if (!miss) return false;
    for (int iter = 0; iter < opts.max_iter && miss->norm() > accept; ++iter) {
        RealMatrix jac(m, m);
        const double dv = 1e-7 * std::max(1.0, v.norm());
        bool jac_ok = true;
        for (int c = 0; c < m; ++c) {
            Vector v_try = v;
            v_try(c) += dv;
            std::optional<Vector> probe = boundary_miss(v_try);
            if (!probe) {
                jac_ok = false;
                break;
            }
            jac.col(c) = (*probe - *miss) / dv;
        }
        if (!jac_ok) break;
        Vector step = jac.fullPivLu().solve(-*miss);
        double damping = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 12; ++halvings) {
            Vector v_new = v + damping * step;
            std::optional<Vector> miss_new = boundary_miss(v_new);
            if (miss_new && miss_new->norm() < miss->norm()) {
                v = v_new;
                miss = miss_new;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;  // line search exhausted; accept or fail below
    }
    if (!boundary_miss(v)) return false;
    initial_velocity = v;
    return miss->norm() <= std::max(accept, 1e-9 * scale);
}

// Mesh relaxation: damped Newton on the centered-difference residual of the
// EL system over interior points; a globalizer, not a polisher.
std::vector<Vector> relaxation_solve(const MetricField& metric,
                                     const ControlPoint& x0,
                                     const ControlPoint& x1,
                                     const GeodesicOptions& opts) {
    const int m = static_cast<int>(x0.size());
    const int mesh = std::min(opts.mesh, 141);
    const int interior = mesh - 2;
    const double h = 1.0 / (mesh - 1);

    std::vector<Vector> xs(static_cast<size_t>(mesh));
    for (int k = 0; k < mesh; ++k)
        xs[static_cast<size_t>(k)] =
            x0 + (x1 - x0) * (static_cast<double>(k) / (mesh - 1));

    auto residual = [&](const std::vector<Vector>& pts) {
        Vector r(interior * m);
        for (int k = 1; k <= interior; ++k) {
            const Vector& xm = pts[static_cast<size_t>(k - 1)];
            const Vector& xc = pts[static_cast<size_t>(k)];
            const Vector& xp = pts[static_cast<size_t>(k + 1)];
            const Vector u = (xp - xm) / (2.0 * h);
            const Vector acc = (xp - 2.0 * xc + xm) / (h * h);
            ChristoffelField gamma =
                christoffel(metric, xc, opts.fd_step, opts.condition_limit);
            for (int i = 0; i < m; ++i)
                r((k - 1) * m + i) =
                    acc(i) + u.dot(gamma.gamma[static_cast<size_t>(i)] * u);
        }
        return r;
    };

    Vector r = residual(xs);
    const double tol = 1e-9 / (h * h);  // discrete-system scale
    for (int iter = 0; iter < std::max(opts.max_iter, 20); ++iter) {
        if (r.cwiseAbs().maxCoeff() < tol) break;
        RealMatrix jac = RealMatrix::Zero(interior * m, interior * m);
        const double du = 1e-6;
        for (int k = 1; k <= interior; ++k)
            for (int i = 0; i < m; ++i) {
                std::vector<Vector> bumped = xs;
                bumped[static_cast<size_t>(k)](i) += du;
                jac.col((k - 1) * m + i) = (residual(bumped) - r) / du;
            }
        Vector step = jac.fullPivLu().solve(-r);
        double damping = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 12; ++halvings) {
            std::vector<Vector> trial = xs;
            for (int k = 1; k <= interior; ++k)
                for (int i = 0; i < m; ++i)
                    trial[static_cast<size_t>(k)](i) +=
                        damping * step((k - 1) * m + i);
            Vector r_new = residual(trial);
            if (r_new.norm() < r.norm()) {
                xs = trial;
                r = r_new;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;
    }
    if (!(r.cwiseAbs().maxCoeff() < 1e-4 / (h * h)))
        throw NoConvergence("relaxation did not reduce the EL residual");
    return xs;
}

}  // namespace

Path solve_geodesic(const MetricField& metric, const ControlPoint& x0,
                    const ControlPoint& x1, const GeodesicOptions& opts) {
    // Surfaces a fundamentally singular metric (reduced parametrization
    // required) before any shooting is attempted.
    christoffel(metric, x0, opts.fd_step, opts.condition_limit);
    christoffel(metric, x1, opts.fd_step, opts.condition_limit);

    std::vector<Vector> xs, us;
    Vector v = x1 - x0;  // straight-line guess
    bool converged = shooting_solve(metric, x0, x1, opts, v, xs, us);
    if (!converged) {
        // Globalize with relaxation, then polish by re-shooting from its
        // initial slope (with its own iteration budget).
        std::vector<Vector> coarse = relaxation_solve(metric, x0, x1, opts);
        const double h = 1.0 / (static_cast<double>(coarse.size()) - 1.0);
        v = (coarse[1] - coarse[0]) / h;
        GeodesicOptions polish = opts;
        polish.max_iter = std::max(opts.max_iter, 25);
        converged = shooting_solve(metric, x0, x1, polish, v, xs, us);
        if (!converged)
            throw NoConvergence("shooting failed even from the relaxed guess");
    }
    Path path = path_from_mesh(xs, us);

    if ((path.end() - x1).norm() > 1e-9 * std::max(1.0, x1.norm()))
        throw NoConvergence("boundary condition not met");

    const double residual = geodesic_residual(metric, path, opts.fd_step);
    if (residual > opts.shooting_tol)
        throw NoConvergence("EL residual " + std::to_string(residual) +
                            " above tolerance");

    const double len = path_length(metric, path, 1e-9);
    const double line_len =
        path_length(metric, Path::line(x0, x1, path.knot_count()), 1e-9);
    if (len > line_len + 1e-9)
        throw NoConvergence("geodesic longer than the straight line");
    return path;
}

Path solve_geodesic(const HamiltonianModel& model, const ControlPoint& x0,
                    const ControlPoint& x1, const GeodesicOptions& opts) {
    return solve_geodesic(metric_field_of(model), x0, x1, opts);
}

namespace {

// Segment integrals of sqrt(p) with algebraic integrable singularities
// allowed at segment endpoints. Singular ends are folded out with x = a + u^2
// so the transformed integrand 2u f(a + u^2) is bounded for f ~ (x-a)^(-1/2);
// the sub-resolution remainder below the smallest representable offset is
// added from the local model.
class SpeedIntegrator {
  public:
    SpeedIntegrator(std::function<double(double)> f, double tol)
        : f_(std::move(f)), tol_(tol) {
        opts_.abs_tol = tol;
        opts_.rel_tol = 1e-13;
        opts_.max_depth = 40;
    }

    double value_or_inf(double x) const {
        try {
            const double p = f_(x);
            if (!(p >= 0.0))
                throw NonIntegrableSingularity("negative metric sample");
            return std::sqrt(p);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    // integral of sqrt(p) over [a, b], a < b; flags mark singular endpoints.
    double segment(double a, double b, bool singular_left,
                   bool singular_right) const {
        if (singular_left && singular_right) {
            const double mid = 0.5 * (a + b);
            return segment(a, mid, true, false) + segment(mid, b, false, true);
        }
        if (singular_left) return folded(a, b, +1.0);
        if (singular_right) return folded(b, a, -1.0);
        auto g = [this](double x) {
            const double v = value_or_inf(x);
            if (!std::isfinite(v))
                throw NonIntegrableSingularity("interior metric divergence");
            return v;
        };
        return adaptive_integrate(g, a, b, opts_);
    }

  private:
    // integral from the singular end `from` toward `to`; sign = +1 when
    // to > from.
    double folded(double from, double to, double sign) const {
        const double span = std::abs(to - from);
        const double u_hi = std::sqrt(span);

        // Probe the local algebraic exponent of sqrt(p) ~ C (x-a)^alpha.
        // Supported class: alpha in (-0.6, 0) -- the inverse-square-root
        // family and milder. Stronger divergences are rejected.
        const double probe = std::min(1e-6, 0.01 * span);
        const double f1 = value_or_inf(from + sign * probe);
        const double f4 = value_or_inf(from + sign * 4.0 * probe);
        if (!std::isfinite(f1) || !std::isfinite(f4))
            throw NonIntegrableSingularity("divergence persists off the edge");
        const double alpha =
            std::log(f4 / f1) / std::log(4.0);  // negative for a divergence
        if (alpha < -0.6)
            throw NonIntegrableSingularity(
                "edge exponent " + std::to_string(alpha) +
                " is below the integrable-quadrature class (> -0.6)");

        // smallest u with from +- u^2 distinguishable from `from`
        const double u_min =
            std::sqrt(std::max(std::abs(from), 1e-3) * 4.4e-16) + 1e-300;
        auto g = [this, from, sign](double u) {
            const double v = value_or_inf(from + sign * u * u);
            if (!std::isfinite(v))
                throw NonIntegrableSingularity(
                    "stronger than inverse-square-root divergence");
            return 2.0 * u * v;
        };
        const double body = adaptive_integrate(g, u_min, u_hi, opts_);
        // Sub-resolution remainder from the measured local power law:
        // integral of 2 C u^{2 alpha + 1} over [0, u_min].
        const double tail = g(u_min) * u_min / (2.0 * alpha + 2.0);
        if (!std::isfinite(body + tail))
            throw NonIntegrableSingularity("folded integrand not integrable");
        return body + tail;
    }

    std::function<double(double)> f_;
    double tol_;
    AdaptiveQuadratureOptions opts_;
};

}  // namespace

Path quadrature_geodesic_1d(const std::function<double(double)>& metric_fn,
                            double x0, double x1, int knots, double tol) {
    if (knots < 2) throw InvalidModel("need at least two knots");
    const double span = x1 - x0;
    if (span == 0.0) throw InvalidModel("degenerate endpoints");

    // Work in the normalized coordinate w in [0,1].
    auto p_of_w = [metric_fn, x0, span](double w) {
        return metric_fn(x0 + w * span);
    };
    const int cells = 128;
    SpeedIntegrator integ(p_of_w, tol / (4.0 * cells));

    std::vector<double> edge(static_cast<size_t>(cells) + 1);
    std::vector<bool> singular(edge.size());
    for (int c = 0; c <= cells; ++c) {
        edge[static_cast<size_t>(c)] = static_cast<double>(c) / cells;
        singular[static_cast<size_t>(c)] =
            !std::isfinite(integ.value_or_inf(edge[static_cast<size_t>(c)]));
    }

    std::vector<double> cum(edge.size(), 0.0);
    for (int c = 0; c < cells; ++c)
        cum[static_cast<size_t>(c + 1)] =
            cum[static_cast<size_t>(c)] +
            integ.segment(edge[static_cast<size_t>(c)],
                          edge[static_cast<size_t>(c + 1)],
                          singular[static_cast<size_t>(c)],
                          singular[static_cast<size_t>(c + 1)]);
    const double total = cum.back();
    if (!(total > 0.0) || !std::isfinite(total))
        throw NonIntegrableSingularity("arc length not positive and finite");

    // Invert s -> w by bisection on the cumulative map within a cell.
    auto invert = [&](double target) {
        if (target <= 0.0) return 0.0;
        if (target >= total) return 1.0;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        size_t c = static_cast<size_t>(it - cum.begin());
        c = (c == 0) ? 0 : c - 1;
        if (c >= static_cast<size_t>(cells)) c = cells - 1;
        double lo = edge[c], hi = edge[c + 1];
        const double base = cum[c];
        for (int iters = 0; iters < 80 && hi - lo > 1e-14; ++iters) {
            const double mid = 0.5 * (lo + hi);
            const double val =
                base + integ.segment(edge[c], mid, singular[c], false);
            if (val < target)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> s(static_cast<size_t>(knots));
    std::vector<Vector> xs(s.size()), us(s.size());
    for (int k = 0; k < knots; ++k) {
        const double sk = static_cast<double>(k) / (knots - 1);
        const double w = invert(sk * total);
        s[static_cast<size_t>(k)] = sk;
        Vector x(1), u(1);
        x(0) = x0 + w * span;
        // dx/ds = span * total / sqrt(p); zero where the metric diverges.
        const double sp = integ.value_or_inf(w);
        u(0) = (sp > 0.0 && std::isfinite(sp)) ? span * total / sp : 0.0;
        xs[static_cast<size_t>(k)] = x;
        us[static_cast<size_t>(k)] = u;
    }
    return Path::from_knots(s, xs, us);
}

SplicedGeodesic solve_geodesic_through_singularity(
    const std::function<double(double)>& metric_fn, double x0, double x1,
    double x_c, double chi, double eta, const GeodesicOptions& opts) {
    Path reference = quadrature_geodesic_1d(metric_fn, x0, x1, 1025);
    double s_c = 0.5;
    {
        double best = 1e300;
        for (int k = 0; k < reference.knot_count(); ++k) {
            const double d =
                std::abs(reference.knots_x()[static_cast<size_t>(k)](0) - x_c);
            if (d < best) {
                best = d;
                s_c = reference.knots_s()[static_cast<size_t>(k)];
            }
        }
    }

    const double sl = s_c - eta, sr = s_c + eta;
    const double amp_l =
        (x_c - reference.position(sl)(0)) / std::pow(eta, chi);
    const double amp_r =
        (reference.position(sr)(0) - x_c) / std::pow(eta, chi);

    ControlPoint a0(1), al(1), ar(1), a1(1);
    a0 << x0;
    al << x_c - amp_l * std::pow(eta, chi);
    ar << x_c + amp_r * std::pow(eta, chi);
    a1 << x1;
    MetricField field = [metric_fn](const ControlPoint& x) {
        RealMatrix g(1, 1);
        g(0, 0) = metric_fn(x(0));
        return g;
    };
    GeodesicOptions half = opts;
    half.mesh = std::max(101, opts.mesh / 4);
    Path left = solve_geodesic(field, a0, al, half);
    Path right = solve_geodesic(field, ar, a1, half);

    auto sampler = [left, right, sl, sr, s_c, x_c, amp_l, amp_r, chi](
                       double s, Vector& x, Vector& v) {
        x.resize(1);
        v.resize(1);
        if (s < sl) {
            left.eval(s / sl, x, v);
            v /= sl;
        } else if (s > sr) {
            right.eval((s - sr) / (1.0 - sr), x, v);
            v /= (1.0 - sr);
        } else if (s < s_c) {
            const double u = s_c - s;
            x(0) = x_c - amp_l * std::pow(u, chi);
            v(0) = amp_l * chi * std::pow(u, chi - 1.0);
        } else {
            const double u = std::max(s - s_c, 1e-300);
            x(0) = x_c + amp_r * std::pow(u, chi);
            v(0) = amp_r * chi * std::pow(u, chi - 1.0);
        }
    };
    SplicedGeodesic out;
    out.s_c = s_c;
    out.path = Path::from_sampler(1, sampler, opts.mesh);

    Vector xl(1), vl(1), xb(1), vb(1);
    out.path.eval(sl - 1e-9, xl, vl);
    out.path.eval(sl + 1e-9, xb, vb);
    out.splice_velocity_residual = (vl - vb).cwiseAbs().maxCoeff();
    return out;
}

double path_length(const MetricField& metric, const Path& path,
                   double rel_tol) {
    auto rho = [&](double s) {
        Vector x(path.param_dim()), v(path.param_dim());
        path.eval(s, x, v);
        const RealMatrix g = metric(x);
        return std::sqrt(std::max(0.0, v.dot(g * v)));
    };
    return refine_simpson(rho, 0.0, 1.0, rel_tol, 64, 14).total();
}

double path_length(const HamiltonianModel& model, const Path& path,
                   double rel_tol) {
    return path_length(metric_field_of(model), path, rel_tol);
}

double geodesic_residual(const MetricField& metric, const Path& path,
                         double fd_step) {
    const auto& s = path.knots_s();
    const auto& xs = path.knots_x();
    const auto& us = path.knots_v();
    const int n = path.knot_count();
    double worst = 0.0;
    // five-point second differences; first derivatives from the stored
    // solver velocities (the centered difference is too noisy for this gate)
    for (int k = 2; k + 2 < n; k += std::max(1, (n - 4) / 64)) {
        const double h = s[static_cast<size_t>(k + 1)] - s[static_cast<size_t>(k)];
        const Vector acc =
            (-xs[static_cast<size_t>(k + 2)] + 16.0 * xs[static_cast<size_t>(k + 1)] -
             30.0 * xs[static_cast<size_t>(k)] + 16.0 * xs[static_cast<size_t>(k - 1)] -
             xs[static_cast<size_t>(k - 2)]) /
            (12.0 * h * h);
        const Vector& u = us[static_cast<size_t>(k)];
        ChristoffelField gamma =
            christoffel(metric, xs[static_cast<size_t>(k)], fd_step);
        Vector r(path.param_dim());
        for (int i = 0; i < path.param_dim(); ++i)
            r(i) = acc(i) + u.dot(gamma.gamma[static_cast<size_t>(i)] * u);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace adiageo
