#pragma once

#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/path.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/types.hpp"

namespace adiageo {

// Riemannian metric on the control manifold,
//   g_ij = Tr[dP_i dP_j] / (2 g0)
//        = (Tr[P0 dH_i R^2 dH_j P0] + (i<->j)) / (2 g0),
// computed through the resolvent (spectral-sum) route.
RealMatrix metric_tensor(const HamiltonianModel& model, const ControlPoint& x,
                         double gap_floor = 1e-10);
RealMatrix metric_tensor(const LocalGeometry& geom);

// Nondegenerate spectral form
//   g_ij = Re sum_{n>0} <0|dH_i|n><n|dH_j|0> / (E_n - E0)^2;
// requires g0 = 1 and equals metric_tensor there.
RealMatrix metric_nondegenerate(const HamiltonianModel& model,
                                const ControlPoint& x,
                                double gap_floor = 1e-10);

// Complex geometric tensor G_ij = Tr[P0 dP_i dP_j P0] / g0, computed through
// explicit projector derivatives (independent of the spectral-sum route).
// Hermitian; Re G = g.
Matrix geometric_tensor(const HamiltonianModel& model, const ControlPoint& x,
                        double gap_floor = 1e-10);
Matrix geometric_tensor(const LocalGeometry& geom);

// Integral representation of G: the tau integral against tau e^{-D tau} is
// carried out per eigenpair (analytically, 1/D^2) or by quadrature over
// [0, tau_max_factor / gap] with a tail estimate.
struct IntegralQuadratureSpec {
    enum class Mode { Analytic, Numeric };
    Mode mode = Mode::Analytic;
    double tau_max_factor = 50.0;
    int panels = 512;        // composite Gauss cells for numeric mode
    double tail_tol = 1e-10;
};

Matrix geometric_tensor_integral(const HamiltonianModel& model,
                                 const ControlPoint& x,
                                 const IntegralQuadratureSpec& spec = {},
                                 double gap_floor = 1e-10);

// Fidelity-based metric via the symmetric logarithmic derivative L = 2 dP0:
// g^Bures_ij = (4/g0) Tr[dP_i dP_j] = 8 g_ij.
RealMatrix bures_metric(const HamiltonianModel& model, const ControlPoint& x,
                        double gap_floor = 1e-10);

// Schedule metric with quartic inverse-gap dependence:
// gt_ij = Tr[dH_i dH_j] / gap^4.
RealMatrix brachistochrone_metric(const HamiltonianModel& model,
                                  const ControlPoint& x,
                                  double gap_floor = 1e-10);

// Frobenius distance between equal-rank projectors, d = ||P - P'||_2 / sqrt(2 g0).
double grassmannian_distance(const Matrix& p, const Matrix& p_prime);

// ---------------------------------------------------------------------------
// Path error functional eps(s) = integral of ||[P0_dot, P0]||_2 ds'.

struct PathErrorAccumulator {
    std::vector<double> s;
    std::vector<double> integrand;  // sqrt(2 g0 g_ij xdot^i xdot^j)
    std::vector<double> eps;        // running integral, eps[0] = 0
    double total() const { return eps.back(); }
    double at(double s_query) const;  // linear interpolation of eps(s)
};

// Metric-quadrature route (the returned value).
PathErrorAccumulator path_error_functional(const HamiltonianModel& model,
                                           const Path& path,
                                           double rel_tol = 1e-8,
                                           double gap_floor = 1e-10);

// Dual route: Frobenius norm of the explicit commutator [P0_dot, P0].
PathErrorAccumulator path_error_frobenius(const HamiltonianModel& model,
                                          const Path& path,
                                          double rel_tol = 1e-8,
                                          double gap_floor = 1e-10);

// Sup-norm variant normalized to coincide with eps in the nondegenerate case:
// integrand sqrt(2 ||P0 Hdot R^2 Hdot P0||). Satisfies
// eps_tilde <= eps <= sqrt(g0) eps_tilde.
PathErrorAccumulator path_error_sup(const HamiltonianModel& model,
                                    const Path& path, double rel_tol = 1e-8,
                                    double gap_floor = 1e-10);

}  // namespace adiageo
