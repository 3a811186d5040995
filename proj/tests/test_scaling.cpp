#include <cmath>
#include <random>

#include "adiageo/errors.hpp"
#include "adiageo/models.hpp"
#include "adiageo/scaling.hpp"
#include "doctest.h"

using namespace adiageo;

TEST_SUITE_BEGIN("scaling");

TEST_CASE("exponent algebra") {
    CriticalExponents ising = ising_exponents();
    CHECK(ising.alpha_i == doctest::Approx(1.0));
    CHECK(kappa(ising) == doctest::Approx(-1.0));
    CHECK(chi_from_kappa(1.0, kappa(ising)) == doctest::Approx(2.0));

    // alpha_i = alpha_j = z with d -> 0: kappa = 0, chi = 1
    CriticalExponents flat;
    flat.z = 0.7;
    flat.alpha_i = flat.alpha_j = 0.7;
    flat.d = 0;
    CHECK(kappa(flat) == doctest::Approx(0.0));
    CHECK(chi_from_kappa(flat.nu, kappa(flat)) == doctest::Approx(1.0));

    // whenever alpha = d + z - 1/nu, chi = 2/(d nu) identically
    for (double nu : {0.5, 1.0, 1.5, 2.0})
        for (double z : {0.5, 1.0, 2.0})
            for (int d : {1, 2, 3}) {
                CriticalExponents e;
                e.nu = nu;
                e.z = z;
                e.d = d;
                e.alpha_i = e.alpha_j = alpha_standard(d, z, nu);
                CHECK(chi_from_kappa(nu, kappa(e)) ==
                      doctest::Approx(2.0 / (d * nu)).epsilon(1e-12));
            }
}

TEST_CASE("fit_power_law") {
    SUBCASE("exact synthetic data") {
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < 40; ++k) {
            const double t = 1e-3 * std::pow(100.0, k / 39.0);
            samples.emplace_back(t, 3.0 * t * t);
        }
        PowerLawFit fit = fit_power_law(samples);
        CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("planted exponent under 1% noise") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> gauss(0.0, 0.01);
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < 60; ++k) {
            const double t = 1e-3 * std::pow(100.0, k / 59.0);
            samples.emplace_back(t, 0.7 * std::pow(t, 1.5) *
                                        std::exp(gauss(rng)));
        }
        PowerLawFit fit = fit_power_law(samples);
        CHECK(std::abs(fit.exponent - 1.5) < 0.05);
    }
    SUBCASE("metric divergence exponent along the interpolation case") {
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < 60; ++k) {
            const double t = 1e-4 * std::pow(100.0, k / 59.0);
            samples.emplace_back(t, models::ising_p_limit(0.5 - t));
        }
        FitWindow window{1e-4, 1e-2};
        PowerLawFit fit = fit_power_law(samples, window);
        CHECK(std::abs(fit.exponent - (-1.0)) < 0.05);
    }
    SUBCASE("geodesic exponent from the closed form") {
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < 60; ++k) {
            const double u = 1e-3 * std::pow(100.0, k / 59.0);
            const double x = models::ising_geodesic_closed_form(
                models::IsingCase::I, 0.5 - u);
            samples.emplace_back(u, std::abs(x - 0.5));
        }
        PowerLawFit fit = fit_power_law(samples);
        CHECK(std::abs(fit.exponent - 2.0) < 0.02);
    }
    SUBCASE("error paths") {
        std::vector<std::pair<double, double>> few = {
            {0.01, 1.0}, {0.02, 1.0}, {0.03, 1.0}};
        CHECK_THROWS_AS(fit_power_law(few), InsufficientSamples);
        std::vector<std::pair<double, double>> bad;
        for (int k = 0; k < 10; ++k)
            bad.emplace_back(0.001 * (k + 1), k == 3 ? -1.0 : 1.0);
        CHECK_THROWS_AS(fit_power_law(bad), NonPositiveData);
    }
}

TEST_CASE("local critical geodesic") {
    SUBCASE("quadratic passage for the chain exponents") {
        CriticalExponents ising = ising_exponents();
        LocalCriticalGeodesic geo =
            critical_geodesic_local(ising, 0.5, 0.5, 1.2, +1);
        CHECK(geo.chi == doctest::Approx(2.0));
        for (double s : {0.4, 0.45, 0.55, 0.62})
            CHECK(std::abs(geo.ode_residual(1.0, -1.0, s)) < 1e-10);
        CHECK(geo(0.5) == doctest::Approx(0.5));
        CHECK(geo(0.6) == doctest::Approx(0.5 + 1.2 * 0.01).epsilon(1e-12));
    }
    SUBCASE("flat local metric gives a straight line") {
        CriticalExponents flat;
        flat.alpha_i = flat.alpha_j = 1.0;
        flat.z = 0.5;
        flat.d = 1;  // kappa = 0 -> chi = 1
        LocalCriticalGeodesic geo =
            critical_geodesic_local(flat, 0.0, 0.0, 0.7, +1);
        CHECK(geo.chi == doctest::Approx(1.0));
        CHECK(geo(0.2) == doctest::Approx(0.14).epsilon(1e-12));
    }
    SUBCASE("reproduces the closed-form geodesic near the critical point") {
        CriticalExponents ising = ising_exponents();
        // amplitude from the Taylor expansion of the closed form:
        // x(s) = 1/2 - (1/2) tan^2(pi/2 (s - 1/2)) ~ 1/2 - (pi^2/8)(s-1/2)^2
        const double amp = M_PI * M_PI / 8.0;
        LocalCriticalGeodesic geo =
            critical_geodesic_local(ising, 0.5, 0.5, amp, -1);
        for (double ds : {0.01, 0.03, 0.05}) {
            const double exact = models::ising_geodesic_closed_form(
                models::IsingCase::I, 0.5 - ds);
            const double local = geo(0.5 - ds);
            CHECK(std::abs(local - exact) / std::abs(exact - 0.5) < 0.01);
        }
    }
}

TEST_CASE("finite-size trend of the per-site metric at criticality") {
    // per-site pullback at x_c grows superlinearly with chain length
    std::vector<std::pair<double, double>> samples;
    for (int m : {10, 20, 30, 50, 100}) {
        models::IsingSpec spec;
        spec.m = m;
        const double sites = 2.0 * m + 1.0;
        samples.emplace_back(sites, models::ising_p(spec, 0.5) / sites);
    }
    FitWindow window{1.0, 1e4};
    PowerLawFit fit = fit_power_law(samples, window);
    CHECK(fit.exponent > 0.7);
    CHECK(fit.exponent < 1.3);
}

TEST_SUITE_END();
