#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// must stay independent of the library code paths they check: projector
// derivatives by central differences of projectors, metrics from those,
// brute-force spectra, etc.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/models.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/types.hpp"
#include "adiageo/util.hpp"

namespace testsupport {

using namespace adiageo;

inline ControlPoint point2(double a, double b) {
    ControlPoint x(2);
    x << a, b;
    return x;
}

inline ControlPoint point1(double a) {
    ControlPoint x(1);
    x << a;
    return x;
}

// Random affine family H(x) = H0 + x1 H1 + x2 H2 on dim-by-dim matrices.
inline HamiltonianModel random_affine_model(unsigned long long seed,
                                            Index dim = 6, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    Matrix h0 = random_hermitian(rng, dim, scale);
    Matrix h1 = random_hermitian(rng, dim, scale);
    Matrix h2 = random_hermitian(rng, dim, scale);
    auto eval = [h0, h1, h2](const ControlPoint& x) {
        return Matrix(h0 + x(0) * h1 + x(1) * h2);
    };
    auto partial = [h1, h2](const ControlPoint&, int i) {
        return i == 0 ? h1 : h2;
    };
    return HamiltonianModel("random_affine", dim, 2, eval, partial);
}

// Nonlinear coefficients, analytic partials.
inline HamiltonianModel random_smooth_model(unsigned long long seed,
                                            Index dim = 6) {
    std::mt19937_64 rng(seed);
    Matrix h0 = random_hermitian(rng, dim);
    Matrix h1 = random_hermitian(rng, dim);
    Matrix h2 = random_hermitian(rng, dim);
    auto eval = [h0, h1, h2](const ControlPoint& x) {
        return Matrix(h0 + std::sin(x(0)) * h1 + std::cos(0.5 * x(1)) * h2);
    };
    auto partial = [h1, h2](const ControlPoint& x, int i) {
        if (i == 0) return Matrix(std::cos(x(0)) * h1);
        return Matrix(-0.5 * std::sin(0.5 * x(1)) * h2);
    };
    return HamiltonianModel("random_smooth", dim, 2, eval, partial);
}

// Exactly twofold-degenerate ground state: H(x) = M(x) (x) I_2 where M is a
// random affine family of half dimension.
inline HamiltonianModel random_degenerate_model(unsigned long long seed,
                                                Index half_dim = 3) {
    HamiltonianModel inner = random_affine_model(seed, half_dim);
    const Index dim = 2 * half_dim;
    auto lift = [](const Matrix& m) {
        Matrix out(2 * m.rows(), 2 * m.cols());
        out.setZero();
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) {
                out(2 * i, 2 * j) = m(i, j);
                out(2 * i + 1, 2 * j + 1) = m(i, j);
            }
        return out;
    };
    auto eval = [inner, lift](const ControlPoint& x) {
        return lift(inner.evaluate(x));
    };
    auto partial = [inner, lift](const ControlPoint& x, int i) {
        return lift(inner.partial(x, i));
    };
    return HamiltonianModel("random_degenerate", dim, 2, eval, partial);
}

// Gauge-free projector derivative oracle: central difference of P0 itself.
inline Matrix fd_projector_derivative(const HamiltonianModel& model,
                                      const ControlPoint& x, int i,
                                      double h = 1e-5) {
    ControlPoint xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const Matrix pp = diagonalize(model, xp).P0;
    const Matrix pm = diagonalize(model, xm).P0;
    return (pp - pm) / (2.0 * h);
}

// Metric oracle from finite-difference projector derivatives:
// g_ij = Tr[dP_i dP_j] / (2 g0).
inline RealMatrix fd_metric(const HamiltonianModel& model,
                            const ControlPoint& x, double h = 1e-5) {
    const int m = model.param_dim();
    std::vector<Matrix> dp;
    for (int i = 0; i < m; ++i)
        dp.push_back(fd_projector_derivative(model, x, i, h));
    const int g0 = diagonalize(model, x).g0;
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g(i, j) = (dp[i] * dp[j]).trace().real() / (2.0 * g0);
    return g;
}

// Brute-force spectral gap from the eigenvalue list, ignoring clustering.
inline double raw_gap(const Matrix& h, double tol = 1e-8) {
    SpectralData spec = diagonalize_matrix(h, tol);
    return spec.gap;
}

}  // namespace testsupport
