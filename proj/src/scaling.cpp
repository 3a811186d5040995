#include "adiageo/scaling.hpp"

#include <cmath>

#include "adiageo/errors.hpp"

namespace adiageo {

double kappa(const CriticalExponents& exps) {
    return exps.alpha_i + exps.alpha_j - 2.0 * exps.z - exps.d;
}

double alpha_standard(int d, double z, double nu) {
    return d + z - 1.0 / nu;
}

double chi_from_kappa(double nu, double kappa_value) {
    return 2.0 / (2.0 + nu * kappa_value);
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples,
                          const FitWindow& window) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [t, y] : samples) {
        if (t < window.t_min || t > window.t_max) continue;
        if (!(t > 0.0) || !(y > 0.0))
            throw NonPositiveData("power-law fit needs t > 0 and y > 0");
        logs.emplace_back(std::log(t), std::log(y));
    }
    const int n = static_cast<int>(logs.size());
    if (n < 5)
        throw InsufficientSamples("need at least 5 samples in the window, got " +
                                  std::to_string(n));

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    PowerLawFit fit;
    fit.samples_used = n;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.prefactor = std::exp(intercept);

    double ss_res = 0.0, ss_tot = 0.0;
    const double y_mean = sy / n;
    for (const auto& [x, y] : logs) {
        const double pred = intercept + fit.exponent * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - y_mean) * (y - y_mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (n > 2) {
        const double s2 = ss_res / (n - 2);
        fit.exponent_stderr = std::sqrt(s2 * n / denom);
    }
    return fit;
}

double LocalCriticalGeodesic::operator()(double s) const {
    return x_c + side * amplitude * std::pow(std::abs(s - s_c), chi);
}

double LocalCriticalGeodesic::derivative(double s) const {
    const double u = std::abs(s - s_c);
    const double sign_u = s >= s_c ? 1.0 : -1.0;
    return side * amplitude * chi * std::pow(u, chi - 1.0) * sign_u;
}

double LocalCriticalGeodesic::second_derivative(double s) const {
    const double u = std::abs(s - s_c);
    return side * amplitude * chi * (chi - 1.0) * std::pow(u, chi - 2.0);
}

double LocalCriticalGeodesic::ode_residual(double nu, double kappa_value,
                                           double s) const {
    const double x = (*this)(s);
    const double xd = derivative(s);
    const double xdd = second_derivative(s);
    return xdd + nu * kappa_value * xd * xd / (2.0 * (x - x_c));
}

LocalCriticalGeodesic critical_geodesic_local(const CriticalExponents& exps,
                                              double x_c, double s_c,
                                              double amplitude, int side) {
    const double chi = chi_from_kappa(exps.nu, kappa(exps));
    if (!(chi > 0.0))
        throw InvalidModel("geodesic exponent must be positive; got " +
                           std::to_string(chi));
    LocalCriticalGeodesic out;
    out.x_c = x_c;
    out.s_c = s_c;
    out.amplitude = amplitude;
    out.chi = chi;
    out.side = side >= 0 ? 1 : -1;
    return out;
}

}  // namespace adiageo
