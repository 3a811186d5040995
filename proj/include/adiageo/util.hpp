#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "adiageo/errors.hpp"
#include "adiageo/types.hpp"

namespace adiageo {

inline bool is_finite(const Matrix& a) {
    return a.allFinite();
}

inline double max_abs(const Matrix& a) {
    return a.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& a) {
    return max_abs(a - a.adjoint());
}

inline double frobenius_norm(const Matrix& a) {
    return a.norm();
}

// Sup-operator norm: largest singular value.
double operator_norm(const Matrix& a);

// Trace norm: sum of singular values.
double trace_norm(const Matrix& a);

// Nearest unitary in Frobenius distance (polar factor).
Matrix polar_unitary(const Matrix& a);

Matrix random_hermitian(std::mt19937_64& rng, Index n, double scale = 1.0);

std::vector<double> linspace(double a, double b, int n);

// ---------------------------------------------------------------------------
// Adaptive quadrature with interior (Gauss-Legendre) nodes only, so integrable
// endpoint singularities are never evaluated exactly.

double gauss15(const std::function<double(double)>& f, double a, double b);

struct AdaptiveQuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    int max_depth = 60;
};

double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, const AdaptiveQuadratureOptions& opts = {});

// Composite trapezoid with dyadic refinement until the total changes by less
// than rel_tol; returns the cumulative integral on the final grid.
struct CumulativeQuadrature {
    std::vector<double> s;
    std::vector<double> value;      // integrand samples
    std::vector<double> cumulative; // running integral, cumulative[0] = 0
    double total() const { return cumulative.back(); }
};

CumulativeQuadrature refine_trapezoid(const std::function<double(double)>& f,
                                      double a, double b, double rel_tol,
                                      int initial_cells = 64,
                                      int max_doublings = 16);

// Composite-Simpson variant of the same ladder: totals carry the fourth-order
// value; cumulative entries use Simpson pairs at even nodes and a one-sided
// third-order rule at odd nodes (clamped to keep running integrals monotone
// for nonnegative integrands).
CumulativeQuadrature refine_simpson(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    int initial_cells = 64,
                                    int max_doublings = 14);

// Romberg extrapolation of the trapezoid ladder; for smooth integrands.
double integrate_romberg(const std::function<double(double)>& f, double a,
                         double b, double rel_tol = 1e-12,
                         int max_levels = 20, double abs_tol = 1e-14);

// ---------------------------------------------------------------------------

// Runs fn(i) for i in [0, n) over `workers` threads; any exception is
// rethrown on the calling thread. Results must be written to pre-sized
// storage indexed by i so that assembly order is deterministic.
void parallel_for_index(int n, int workers, const std::function<void(int)>& fn);

int default_workers();  // from ADIAGEO_WORKERS, else 1

// Fixed-width float formatting used by every CSV/JSON writer (17 significant
// digits round-trips doubles exactly).
std::string format_double(double v);

}  // namespace adiageo
