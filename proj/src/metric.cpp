#include "adiageo/metric.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "adiageo/errors.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

namespace {

// <v_n| dH_i |v_a> for excited n and ground-cluster a, divided by (E_n - E0).
// Column block of the resolvent-weighted coupling used by the spectral sums.
struct CouplingBlocks {
    // blocks[i] is (N - g0) x g0 with rows scaled by 1/(E_n - E0)
    std::vector<Matrix> scaled;
    // raw[i] without the energy denominator
    std::vector<Matrix> raw;
};

CouplingBlocks coupling_blocks(const SpectralData& spec,
                               const std::vector<Matrix>& dH,
                               double gap_floor) {
    if (!(spec.gap > gap_floor))
        throw GapCollapse("gap at or below floor in metric evaluation");
    const Index n = spec.eigenvalues.size();
    const int g0 = spec.g0;
    const Index n_exc = n - g0;
    CouplingBlocks out;
    const Matrix ground = spec.eigenvectors.leftCols(g0);
    const Matrix excited = spec.eigenvectors.rightCols(n_exc);
    for (const Matrix& dh : dH) {
        Matrix w = excited.adjoint() * dh * ground;  // (N-g0) x g0
        Matrix ws = w;
        for (Index r = 0; r < n_exc; ++r)
            ws.row(r) /= (spec.eigenvalues(g0 + r) - spec.E0);
        out.raw.push_back(std::move(w));
        out.scaled.push_back(std::move(ws));
    }
    return out;
}

}  // namespace

RealMatrix metric_tensor(const HamiltonianModel& model, const ControlPoint& x,
                         double gap_floor) {
    SpectralData spec = diagonalize(model, x);
    std::vector<Matrix> dH;
    for (int i = 0; i < model.param_dim(); ++i) dH.push_back(model.partial(x, i));
    const CouplingBlocks blocks = coupling_blocks(spec, dH, gap_floor);
    const int m = model.param_dim();
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const Complex sum =
                (blocks.scaled[static_cast<size_t>(i)].adjoint() *
                 blocks.scaled[static_cast<size_t>(j)])
                    .trace();
            g(i, j) = g(j, i) = sum.real() / spec.g0;
        }
    return g;
}

RealMatrix metric_tensor(const LocalGeometry& geom) {
    // Resolvent route expressed with the assembled R: g_ij =
    // Re Tr[P0 dH_i R^2 dH_j P0] / g0.
    const int m = static_cast<int>(geom.dH.size());
    const Matrix r2 = geom.R * geom.R;
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const Complex tr = (geom.spec.P0 * geom.dH[static_cast<size_t>(i)] *
                                r2 * geom.dH[static_cast<size_t>(j)] *
                                geom.spec.P0)
                                   .trace();
            g(i, j) = g(j, i) = tr.real() / geom.spec.g0;
        }
    return g;
}

RealMatrix metric_nondegenerate(const HamiltonianModel& model,
                                const ControlPoint& x, double gap_floor) {
    SpectralData spec = diagonalize(model, x);
    if (spec.g0 != 1)
        throw DegenerateGround("ground degeneracy is " +
                               std::to_string(spec.g0) +
                               "; the nondegenerate form requires g0 = 1");
    if (!(spec.gap > gap_floor)) throw GapCollapse("gap at or below floor");
    const Index n = spec.eigenvalues.size();
    const int m = model.param_dim();
    const ComplexVector ground = spec.eigenvectors.col(0);
    std::vector<ComplexVector> couplings;
    for (int i = 0; i < m; ++i)
        couplings.push_back(spec.eigenvectors.rightCols(n - 1).adjoint() *
                            (model.partial(x, i) * ground));
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Complex sum = 0.0;
            for (Index k = 0; k < n - 1; ++k) {
                const double de = spec.eigenvalues(k + 1) - spec.E0;
                sum += std::conj(couplings[static_cast<size_t>(i)](k)) *
                       couplings[static_cast<size_t>(j)](k) / (de * de);
            }
            g(i, j) = g(j, i) = sum.real();
        }
    return g;
}

Matrix geometric_tensor(const HamiltonianModel& model, const ControlPoint& x,
                        double gap_floor) {
    return geometric_tensor(local_geometry(model, x, gap_floor));
}

Matrix geometric_tensor(const LocalGeometry& geom) {
    const int m = static_cast<int>(geom.dP.size());
    Matrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g(i, j) = (geom.spec.P0 * geom.dP[static_cast<size_t>(i)] *
                       geom.dP[static_cast<size_t>(j)] * geom.spec.P0)
                          .trace() /
                      static_cast<double>(geom.spec.g0);
    return 0.5 * (g + g.adjoint());
}

Matrix geometric_tensor_integral(const HamiltonianModel& model,
                                 const ControlPoint& x,
                                 const IntegralQuadratureSpec& spec,
                                 double gap_floor) {
    SpectralData sd = diagonalize(model, x);
    if (!(sd.gap > gap_floor)) throw GapCollapse("gap at or below floor");
    const int m = model.param_dim();
    const Index n = sd.eigenvalues.size();
    const int g0 = sd.g0;

    // Everything in the eigenbasis, energies measured from E0.
    std::vector<Matrix> dh_eig;
    for (int i = 0; i < m; ++i)
        dh_eig.push_back(sd.eigenvectors.adjoint() * model.partial(x, i) *
                         sd.eigenvectors);
    Vector omega = sd.eigenvalues.array() - sd.E0;

    // Ground-cluster averages for the connected-part subtraction.
    std::vector<Complex> dh_mean(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        dh_mean[static_cast<size_t>(i)] =
            dh_eig[static_cast<size_t>(i)].topLeftCorner(g0, g0).trace();

    // Integrand at fixed tau:
    //   (1/g0) [ Tr[P0 dH_i(tau) dH_j] - Tr[P0 dH_i] Tr[P0 dH_j] / g0 ],
    // dH_i(tau) = e^{tau (H - E0)} dH_i e^{-tau (H - E0)}.
    auto integrand = [&](int i, int j, double tau) {
        Complex sum = 0.0;
        for (int a = 0; a < g0; ++a)
            for (Index k = 0; k < n; ++k)
                sum += std::exp(-tau * omega(k)) *
                       dh_eig[static_cast<size_t>(i)](a, k) *
                       dh_eig[static_cast<size_t>(j)](k, a);
        sum -= dh_mean[static_cast<size_t>(i)] *
               dh_mean[static_cast<size_t>(j)] / static_cast<double>(g0);
        return sum / static_cast<double>(g0);
    };

    Matrix g(m, m);
    if (spec.mode == IntegralQuadratureSpec::Mode::Analytic) {
        // integral of tau e^{-omega tau} = 1/omega^2 per eigenpair; the
        // tau-independent ground-cluster part cancels against the
        // subtraction exactly and is dropped by omega > 0 filtering.
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Complex sum = 0.0;
                for (int a = 0; a < g0; ++a)
                    for (Index k = g0; k < n; ++k)
                        sum += dh_eig[static_cast<size_t>(i)](a, k) *
                               dh_eig[static_cast<size_t>(j)](k, a) /
                               (omega(k) * omega(k));
                g(i, j) = sum / static_cast<double>(g0);
            }
        return 0.5 * (g + g.adjoint());
    }

    const double tau_max = spec.tau_max_factor / sd.gap;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            // Composite Gauss-Legendre in tau on [0, tau_max].
            Complex total = 0.0;
            const int cells = spec.panels;
            for (int c = 0; c < cells; ++c) {
                const double a = tau_max * c / cells;
                const double b = tau_max * (c + 1) / cells;
                auto fre = [&](double tau) {
                    return (tau * integrand(i, j, tau)).real();
                };
                auto fim = [&](double tau) {
                    return (tau * integrand(i, j, tau)).imag();
                };
                total += Complex(gauss15(fre, a, b), gauss15(fim, a, b));
            }
            // Tail bound: |integrand| <= C e^{-gap tau}; the remaining mass
            // is ~ tau_max e^{-gap tau_max} / gap * C.
            const double c_scale = std::abs(integrand(i, j, 0.0)) + 1e-30;
            const double tail = c_scale * (tau_max + 1.0 / sd.gap) *
                                std::exp(-sd.gap * tau_max) / sd.gap;
            if (tail > spec.tail_tol)
                throw QuadratureNotConverged(
                    "tau tail estimate exceeds tolerance; raise tau_max_factor");
            g(i, j) = total;
        }
    return 0.5 * (g + g.adjoint());
}

RealMatrix bures_metric(const HamiltonianModel& model, const ControlPoint& x,
                        double gap_floor) {
    LocalGeometry geom = local_geometry(model, x, gap_floor);
    const int m = static_cast<int>(geom.dP.size());
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double tr = (geom.dP[static_cast<size_t>(i)] *
                               geom.dP[static_cast<size_t>(j)])
                                  .trace()
                                  .real();
            g(i, j) = g(j, i) = 4.0 * tr / geom.spec.g0;
        }
    return g;
}

RealMatrix brachistochrone_metric(const HamiltonianModel& model,
                                  const ControlPoint& x, double gap_floor) {
    SpectralData spec = diagonalize(model, x);
    if (!(spec.gap > gap_floor)) throw GapCollapse("gap at or below floor");
    const int m = model.param_dim();
    std::vector<Matrix> dH;
    for (int i = 0; i < m; ++i) dH.push_back(model.partial(x, i));
    const double gap4 = std::pow(spec.gap, 4);
    RealMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const double tr = (dH[static_cast<size_t>(i)] *
                               dH[static_cast<size_t>(j)])
                                  .trace()
                                  .real();
            g(i, j) = g(j, i) = tr / gap4;
        }
    return g;
}

double grassmannian_distance(const Matrix& p, const Matrix& p_prime) {
    if (p.rows() != p_prime.rows() || p.cols() != p_prime.cols())
        throw RankMismatch("projector dimensions differ");
    const double rank_a = p.trace().real();
    const double rank_b = p_prime.trace().real();
    if (std::abs(rank_a - rank_b) > 1e-8)
        throw RankMismatch("projector ranks differ: " + std::to_string(rank_a) +
                           " vs " + std::to_string(rank_b));
    const double g0 = std::round(rank_a);
    return frobenius_norm(p - p_prime) / std::sqrt(2.0 * g0);
}

namespace {

PathErrorAccumulator accumulate(const std::function<double(double)>& rho,
                                double rel_tol) {
    CumulativeQuadrature q = refine_simpson(rho, 0.0, 1.0, rel_tol, 64, 14);
    PathErrorAccumulator acc;
    acc.s = q.s;
    acc.integrand = q.value;
    acc.eps = q.cumulative;
    return acc;
}

}  // namespace

double PathErrorAccumulator::at(double s_query) const {
    const auto it = std::upper_bound(s.begin(), s.end(), s_query);
    if (it == s.begin()) return eps.front();
    const size_t k = static_cast<size_t>(it - s.begin()) - 1;
    if (k + 1 >= s.size()) return eps.back();
    const double t = (s_query - s[k]) / (s[k + 1] - s[k]);
    return eps[k] + t * (eps[k + 1] - eps[k]);
}

PathErrorAccumulator path_error_functional(const HamiltonianModel& model,
                                           const Path& path, double rel_tol,
                                           double gap_floor) {
    auto rho = [&model, &path, gap_floor](double s) {
        Vector x(path.param_dim()), v(path.param_dim());
        path.eval(s, x, v);
        SpectralData spec = diagonalize(model, x);
        std::vector<Matrix> dH;
        for (int i = 0; i < model.param_dim(); ++i)
            dH.push_back(model.partial(x, i));
        const CouplingBlocks blocks = coupling_blocks(spec, dH, gap_floor);
        RealMatrix g(model.param_dim(), model.param_dim());
        for (int i = 0; i < model.param_dim(); ++i)
            for (int j = i; j < model.param_dim(); ++j) {
                const Complex sum =
                    (blocks.scaled[static_cast<size_t>(i)].adjoint() *
                     blocks.scaled[static_cast<size_t>(j)])
                        .trace();
                g(i, j) = g(j, i) = sum.real() / spec.g0;
            }
        const double quad = v.dot(g * v);
        return std::sqrt(std::max(0.0, 2.0 * spec.g0 * quad));
    };
    return accumulate(rho, rel_tol);
}

PathErrorAccumulator path_error_frobenius(const HamiltonianModel& model,
                                          const Path& path, double rel_tol,
                                          double gap_floor) {
    auto rho = [&model, &path, gap_floor](double s) {
        Vector x(path.param_dim()), v(path.param_dim());
        path.eval(s, x, v);
        LocalGeometry geom = local_geometry(model, x, gap_floor);
        const Matrix p_dot = geom.p_dot(v);
        const Matrix comm = p_dot * geom.spec.P0 - geom.spec.P0 * p_dot;
        return frobenius_norm(comm);
    };
    return accumulate(rho, rel_tol);
}

PathErrorAccumulator path_error_sup(const HamiltonianModel& model,
                                    const Path& path, double rel_tol,
                                    double gap_floor) {
    auto rho = [&model, &path, gap_floor](double s) {
        Vector x(path.param_dim()), v(path.param_dim());
        path.eval(s, x, v);
        LocalGeometry geom = local_geometry(model, x, gap_floor);
        const Matrix h_dot = geom.h_dot(v);
        const Matrix y =
            geom.spec.P0 * h_dot * geom.R * geom.R * h_dot * geom.spec.P0;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (y + y.adjoint()));
        return std::sqrt(2.0 * std::max(0.0, es.eigenvalues().maxCoeff()));
    };
    return accumulate(rho, rel_tol);
}

}  // namespace adiageo
