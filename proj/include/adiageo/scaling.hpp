#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "adiageo/types.hpp"

namespace adiageo {

// Critical-exponent bookkeeping for second-order transitions:
// kappa_ij = alpha_i + alpha_j - 2 z - d, chi = 2 / (2 + nu kappa).
struct CriticalExponents {
    double nu = 1.0;    // correlation length
    double z = 1.0;     // dynamical
    int d = 1;          // spatial dimension
    double alpha_i = 1.0;
    double alpha_j = 1.0;
};

double kappa(const CriticalExponents& exps);

// Scaling dimension d + z - 1/nu of the relevant coupling.
double alpha_standard(int d, double z, double nu);

double chi_from_kappa(double nu, double kappa_value);

inline CriticalExponents ising_exponents() {
    CriticalExponents e;
    e.nu = 1.0;
    e.z = 1.0;
    e.d = 1;
    e.alpha_i = e.alpha_j = alpha_standard(1, 1.0, 1.0);
    return e;
}

// ---------------------------------------------------------------------------

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double exponent_stderr = 0.0;
    int samples_used = 0;
};

struct FitWindow {
    double t_min = 1e-3;
    double t_max = 1e-1;
};

// Ordinary least squares on (log t, log y) restricted to the window.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples,
                          const FitWindow& window = {});

// Local geodesic through a critical point: x(s) = x_c + side A |s-s_c|^chi,
// the exact solution of xddot + nu kappa xdot^2 / (2 (x - x_c)) = 0.
struct LocalCriticalGeodesic {
    double x_c, s_c, amplitude, chi;
    int side;  // +1 departs above x_c, -1 below

    double operator()(double s) const;
    double derivative(double s) const;
    double second_derivative(double s) const;
    // residual of the local EL equation at s (analytic derivatives)
    double ode_residual(double nu, double kappa_value, double s) const;
};

LocalCriticalGeodesic critical_geodesic_local(const CriticalExponents& exps,
                                              double x_c, double s_c,
                                              double amplitude, int side);

}  // namespace adiageo
