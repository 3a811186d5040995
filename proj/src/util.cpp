#include "adiageo/util.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cstdio>
#include <cstdlib>
#include <future>

namespace adiageo {

double operator_norm(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double trace_norm(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

Matrix polar_unitary(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix random_hermitian(std::mt19937_64& rng, Index n, double scale) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix b(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            b(i, j) = Complex(gauss(rng), gauss(rng));
    Matrix h = 0.5 * scale * (b + b.adjoint());
    return h;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

namespace {

// 7/15-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kG7X[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972, 0.7415311855993945, 0.9491079123427585};
constexpr double kG7W[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};
constexpr double kG15X[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kG15W[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gauss7(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 7; ++i) sum += kG7W[i] * f(c + h * kG7X[i]);
    return sum * h;
}

struct AdaptiveState {
    const std::function<double(double)>* f;
    AdaptiveQuadratureOptions opts;
    double total_estimate;
};

double adapt_rec(const AdaptiveState& st, double a, double b, double coarse,
                 int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss15(*st.f, a, mid);
    const double right = gauss15(*st.f, mid, b);
    const double fine = left + right;
    const double err = std::abs(fine - coarse);
    const double tol = std::max(st.opts.abs_tol,
                                st.opts.rel_tol * std::abs(st.total_estimate));
    if (err <= tol || depth >= st.opts.max_depth) {
        if (depth >= st.opts.max_depth && err > 64 * tol)
            throw NonIntegrableSingularity(
                "adaptive quadrature failed to converge on [" +
                std::to_string(a) + ", " + std::to_string(b) + "]");
        return fine;
    }
    return adapt_rec(st, a, mid, left, depth + 1) +
           adapt_rec(st, mid, b, right, depth + 1);
}

}  // namespace

double gauss15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 15; ++i) sum += kG15W[i] * f(c + h * kG15X[i]);
    return sum * h;
}

double adaptive_integrate(const std::function<double(double)>& f, double a,
                          double b, const AdaptiveQuadratureOptions& opts) {
    if (a == b) return 0.0;
    AdaptiveState st{&f, opts, 0.0};
    st.total_estimate = gauss15(f, a, b);
    if (!std::isfinite(st.total_estimate))
        throw NonIntegrableSingularity("non-finite integrand sample");
    const double coarse = gauss7(f, a, b);
    return adapt_rec(st, a, b, coarse, 0);
}

CumulativeQuadrature refine_trapezoid(const std::function<double(double)>& f,
                                      double a, double b, double rel_tol,
                                      int initial_cells, int max_doublings) {
    int n = initial_cells;
    std::vector<double> s, v;
    auto build = [&](int cells) {
        s = linspace(a, b, cells + 1);
        v.resize(s.size());
        for (size_t i = 0; i < s.size(); ++i) v[i] = f(s[i]);
    };
    auto total = [&]() {
        double t = 0.0;
        for (size_t i = 0; i + 1 < s.size(); ++i)
            t += 0.5 * (v[i] + v[i + 1]) * (s[i + 1] - s[i]);
        return t;
    };
    build(n);
    double prev = total();
    for (int k = 0; k < max_doublings; ++k) {
        build(2 * n);
        n *= 2;
        double cur = total();
        if (std::abs(cur - prev) <=
            std::max(rel_tol * std::abs(cur), 1e-14)) {
            prev = cur;
            break;
        }
        prev = cur;
        if (k + 1 == max_doublings)
            throw QuadratureNotConverged("trapezoid refinement stalled");
    }
    CumulativeQuadrature out;
    out.s = s;
    out.value = v;
    out.cumulative.resize(s.size(), 0.0);
    for (size_t i = 0; i + 1 < s.size(); ++i)
        out.cumulative[i + 1] = out.cumulative[i] +
                                0.5 * (v[i] + v[i + 1]) * (s[i + 1] - s[i]);
    return out;
}

CumulativeQuadrature refine_simpson(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    int initial_cells, int max_doublings) {
    int n = initial_cells;
    if (n % 2) ++n;
    std::vector<double> s, v;
    auto build = [&](int cells) {
        s = linspace(a, b, cells + 1);
        v.resize(s.size());
        for (size_t i = 0; i < s.size(); ++i) v[i] = f(s[i]);
    };
    auto simpson_total = [&]() {
        double t = 0.0;
        for (size_t i = 0; i + 2 < s.size(); i += 2)
            t += (s[i + 2] - s[i]) / 6.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
        return t;
    };
    build(n);
    double prev = simpson_total();
    for (int k = 0; k < max_doublings; ++k) {
        build(2 * n);
        n *= 2;
        const double cur = simpson_total();
        const bool done = std::abs(cur - prev) <=
                          std::max(rel_tol * std::abs(cur), 1e-14);
        prev = cur;
        if (done) break;
        if (k + 1 == max_doublings)
            throw QuadratureNotConverged("Simpson refinement stalled");
    }
    CumulativeQuadrature out;
    out.s = s;
    out.value = v;
    out.cumulative.resize(s.size(), 0.0);
    for (size_t i = 0; i + 2 < s.size(); i += 2) {
        const double h2 = s[i + 1] - s[i];
        const double pair =
            (s[i + 2] - s[i]) / 6.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
        const double first =
            std::max(0.0, h2 / 12.0 * (5.0 * v[i] + 8.0 * v[i + 1] - v[i + 2]));
        out.cumulative[i + 1] = out.cumulative[i] + std::min(first, pair);
        out.cumulative[i + 2] = out.cumulative[i] + pair;
    }
    return out;
}

double integrate_romberg(const std::function<double(double)>& f, double a,
                         double b, double rel_tol, int max_levels,
                         double abs_tol) {
    std::vector<std::vector<double>> table;
    double h = b - a;
    long n = 1;
    double trapezoid = 0.5 * h * (f(a) + f(b));
    table.push_back({trapezoid});
    for (int k = 1; k < max_levels; ++k) {
        h *= 0.5;
        double sum = 0.0;
        for (long j = 0; j < n; ++j) sum += f(a + (2 * j + 1) * h);
        n *= 2;
        trapezoid = 0.5 * table[static_cast<size_t>(k - 1)][0] + h * sum;
        std::vector<double> row{trapezoid};
        double pow4 = 4.0;
        for (int m = 1; m <= k; ++m) {
            row.push_back((pow4 * row[static_cast<size_t>(m - 1)] -
                           table[static_cast<size_t>(k - 1)][static_cast<size_t>(m - 1)]) /
                          (pow4 - 1.0));
            pow4 *= 4.0;
        }
        const double best = row.back();
        const double prev = table.back().back();
        table.push_back(row);
        if (k >= 4 && std::abs(best - prev) <=
                          std::max(rel_tol * std::abs(best), abs_tol))
            return best;
    }
    throw QuadratureNotConverged("Romberg ladder did not converge");
}

void parallel_for_index(int n, int workers,
                        const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        }));
    }
    for (auto& f : futs) f.get();  // rethrows
}

int default_workers() {
    if (const char* env = std::getenv("ADIAGEO_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace adiageo
