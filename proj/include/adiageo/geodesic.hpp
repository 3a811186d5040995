#pragma once

#include <functional>
#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/path.hpp"
#include "adiageo/types.hpp"

namespace adiageo {

// A metric field over the control manifold. Geodesic solvers work against
// this interface so that analytic metrics (large Ising chains) and
// diagonalization-backed metrics share one code path.
using MetricField = std::function<RealMatrix(const ControlPoint&)>;

MetricField metric_field_of(const HamiltonianModel& model,
                            double gap_floor = 1e-10);

// Gamma^i_{jk}, symmetric in (j,k); metric derivatives by central finite
// differences with step fd_step.
struct ChristoffelField {
    ControlPoint x;
    std::vector<RealMatrix> gamma;  // gamma[i](j,k)
};

ChristoffelField christoffel(const MetricField& metric, const ControlPoint& x,
                             double fd_step = 1e-5,
                             double condition_limit = 1e12);

struct GeodesicOptions {
    int mesh = 801;              // RK4 mesh points (odd preferred)
    double shooting_tol = 1e-5;  // residual gate on || xddot + Gamma xdot xdot ||
    double boundary_tol = 1e-10;
    int max_iter = 50;
    double fd_step = 1e-5;       // metric-derivative step inside christoffel
    double condition_limit = 1e12;
};

// Fixed-endpoint solution of xddot^i + Gamma^i_{jk} xdot^j xdot^k = 0 by
// single shooting on xdot(0) with a damped Newton iteration, falling back to
// mesh relaxation when shooting stalls.
Path solve_geodesic(const MetricField& metric, const ControlPoint& x0,
                    const ControlPoint& x1, const GeodesicOptions& opts = {});
Path solve_geodesic(const HamiltonianModel& model, const ControlPoint& x0,
                    const ControlPoint& x1, const GeodesicOptions& opts = {});

// One-dimensional geodesic by normalized arc length:
// s(x) = int_{x0}^{x} sqrt(p) / int_{x0}^{x1} sqrt(p), inverted pointwise.
// Handles integrable singularities of p at the endpoints or interior points
// (never evaluates p exactly at cell boundaries).
Path quadrature_geodesic_1d(const std::function<double(double)>& metric_fn,
                            double x0, double x1, int knots = 257,
                            double tol = 1e-10);

// Geodesic across an interior point where the metric diverges: BVP halves on
// [0, s_c - eta] and [s_c + eta, 1] bridged by the local power law
// x ~ x_c + A |s - s_c|^chi, spliced into one path. The quadrature form is
// the reference solution; this records the velocity mismatch at the splice.
struct SplicedGeodesic {
    Path path;
    double s_c;
    double splice_velocity_residual;
};

SplicedGeodesic solve_geodesic_through_singularity(
    const std::function<double(double)>& metric_fn, double x0, double x1,
    double x_c, double chi, double eta = 0.05,
    const GeodesicOptions& opts = {});

// Reparametrization-invariant length int sqrt(g_ij xdot^i xdot^j) ds.
double path_length(const MetricField& metric, const Path& path,
                   double rel_tol = 1e-8);
double path_length(const HamiltonianModel& model, const Path& path,
                   double rel_tol = 1e-8);

// EL residual max over interior mesh points, from five-point second
// differences of the stored knots; reported alongside solver output.
double geodesic_residual(const MetricField& metric, const Path& path,
                         double fd_step = 1e-5);

}  // namespace adiageo
