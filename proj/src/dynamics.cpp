#include "adiageo/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "adiageo/errors.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

namespace {

// One Newton-Schulz sweep toward the polar factor; ample for the tiny
// unitarity drift of a fourth-order step.
void restore_unitarity(Matrix& v) {
    const Matrix gram = v.adjoint() * v;
    const double defect =
        max_abs(gram - Matrix::Identity(gram.rows(), gram.cols()));
    if (defect > 1e-12)
        v = 0.5 * v *
            (3.0 * Matrix::Identity(gram.rows(), gram.cols()) - gram);
}

using GeneratorFn = std::function<Matrix(double)>;  // s -> H_effective(s)

// Fixed-step RK4 for i dV/ds = T H(s) V, recording V on a uniform grid whose
// spacing divides the step grid.
std::vector<Matrix> rk4_run(const GeneratorFn& h_of_s, double T, Index dim,
                            long steps, int record) {
    const double h = 1.0 / static_cast<double>(steps);
    const long stride = steps / (record - 1);
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(record));
    Matrix v = Matrix::Identity(dim, dim);
    out.push_back(v);

    const Complex minus_iT(0.0, -T);
    Matrix h_left = h_of_s(0.0);
    for (long k = 0; k < steps; ++k) {
        const double s = static_cast<double>(k) * h;
        const Matrix h_mid = h_of_s(s + 0.5 * h);
        const Matrix h_right = h_of_s(s + h);
        const Matrix k1 = minus_iT * (h_left * v);
        const Matrix k2 = minus_iT * (h_mid * (v + 0.5 * h * k1));
        const Matrix k3 = minus_iT * (h_mid * (v + 0.5 * h * k2));
        const Matrix k4 = minus_iT * (h_right * (v + h * k3));
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        restore_unitarity(v);
        h_left = h_right;
        if ((k + 1) % stride == 0) out.push_back(v);
    }
    return out;
}

std::vector<Matrix> adaptive_run(const GeneratorFn& h_of_s, double T,
                                 Index dim, const PropagationOptions& opts,
                                 double h_norm_estimate, long* steps_used) {
    if (!(T > 0.0)) throw InvalidModel("total time must be positive");
    const int record = std::max(2, opts.record);
    // Fourth-order heuristic: global error ~ (T |H| / n)^4 (T |H|).
    const double omega = std::max(1.0, T * h_norm_estimate);
    double guess =
        std::pow(omega, 1.25) / (3.0 * std::pow(opts.local_tol, 0.25));
    long steps = std::max<long>(opts.min_steps, static_cast<long>(guess));
    // round up to a multiple of record-1
    const long chunk = record - 1;
    steps = ((steps + chunk - 1) / chunk) * chunk;

    std::vector<Matrix> coarse = rk4_run(h_of_s, T, dim, steps, record);
    if (!opts.verify) {
        if (steps_used) *steps_used = steps;
        return coarse;
    }
    for (;;) {
        if (2 * steps > opts.max_steps)
            throw StepLimitExceeded("step doubling exceeded max_steps at " +
                                    std::to_string(steps));
        std::vector<Matrix> fine = rk4_run(h_of_s, T, dim, 2 * steps, record);
        const double err = max_abs(fine.back() - coarse.back());
        if (err < opts.local_tol) {
            if (steps_used) *steps_used = 2 * steps;
            return fine;
        }
        steps *= 2;
        coarse = std::move(fine);
    }
}

double spectral_norm_estimate(const HamiltonianModel& model,
                              const Path& path) {
    double worst = 1e-12;
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        SpectralData sd = diagonalize(model, path.position(s));
        worst = std::max(worst, sd.h_norm);
    }
    return worst;
}

Matrix commutator_term(const HamiltonianModel& model, const Path& path,
                       double s, double gap_floor) {
    Vector x(path.param_dim()), v(path.param_dim());
    path.eval(s, x, v);
    SpectralData sd = diagonalize(model, x);
    const Matrix r = reduced_resolvent(sd, gap_floor);
    const Matrix h_dot = model.directional(x, v);
    // [P0_dot, P0] = P0 Hdot R - R Hdot P0
    Matrix comm = sd.P0 * h_dot * r - r * h_dot * sd.P0;
    return 0.5 * (comm - comm.adjoint());
}

// Uniform-grid matrix tables with 4-point (cubic) Lagrange interpolation.
class MatrixTable {
  public:
    MatrixTable() = default;
    MatrixTable(std::vector<Matrix> samples)
        : samples_(std::move(samples)), n_(static_cast<long>(samples_.size())) {}

    Matrix operator()(double s) const {
        const double t = std::clamp(s, 0.0, 1.0) * (n_ - 1);
        long j = static_cast<long>(std::floor(t)) - 1;
        j = std::clamp<long>(j, 0, n_ - 4);
        const double u = t - j;  // in [~1, 2] away from the ends
        // cubic Lagrange weights on nodes {0,1,2,3}
        const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
        const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
        const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
        const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
        return w0 * samples_[static_cast<size_t>(j)] +
               w1 * samples_[static_cast<size_t>(j + 1)] +
               w2 * samples_[static_cast<size_t>(j + 2)] +
               w3 * samples_[static_cast<size_t>(j + 3)];
    }

  private:
    std::vector<Matrix> samples_;
    long n_ = 0;
};

MatrixTable tabulate(const std::function<Matrix(double)>& f, int points) {
    std::vector<Matrix> samples(static_cast<size_t>(points));
    for (int j = 0; j < points; ++j)
        samples[static_cast<size_t>(j)] =
            f(static_cast<double>(j) / (points - 1));
    return MatrixTable(std::move(samples));
}

}  // namespace

std::vector<Matrix> propagate(const HamiltonianModel& model, const Path& path,
                              double T, const PropagationOptions& opts,
                              long* steps_used) {
    auto direct = [&model, &path](double s) {
        return model.evaluate(path.position(s));
    };
    if (opts.table_points >= 8) {
        MatrixTable table = tabulate(direct, opts.table_points);
        return adaptive_run([table](double s) { return table(s); }, T,
                            model.dim(), opts,
                            spectral_norm_estimate(model, path), steps_used);
    }
    return adaptive_run(direct, T, model.dim(), opts,
                        spectral_norm_estimate(model, path), steps_used);
}

std::vector<Matrix> propagate_fixed(const HamiltonianModel& model,
                                    const Path& path, double T, long steps,
                                    int record) {
    auto h_of_s = [&model, &path](double s) {
        return model.evaluate(path.position(s));
    };
    record = std::max(2, record);
    const long chunk = record - 1;
    steps = ((steps + chunk - 1) / chunk) * chunk;
    return rk4_run(h_of_s, T, model.dim(), steps, record);
}

Matrix adiabatic_hamiltonian(const HamiltonianModel& model, const Path& path,
                             double s, double T, double gap_floor) {
    const Matrix h = model.evaluate(path.position(s));
    const Matrix comm = commutator_term(model, path, s, gap_floor);
    Matrix h_ad = h + Complex(0.0, 1.0 / T) * comm;
    return 0.5 * (h_ad + h_ad.adjoint());
}

std::vector<Matrix> propagate_adiabatic(const HamiltonianModel& model,
                                        const Path& path, double T,
                                        const PropagationOptions& opts,
                                        long* steps_used) {
    if (opts.table_points >= 8) {
        MatrixTable h_table = tabulate(
            [&](double s) { return model.evaluate(path.position(s)); },
            opts.table_points);
        MatrixTable comm_table = tabulate(
            [&](double s) {
                return commutator_term(model, path, s, opts.gap_floor);
            },
            opts.table_points);
        const Complex i_over_T(0.0, 1.0 / T);
        auto gen = [h_table, comm_table, i_over_T](double s) {
            return Matrix(h_table(s) + i_over_T * comm_table(s));
        };
        return adaptive_run(gen, T, model.dim(), opts,
                            spectral_norm_estimate(model, path), steps_used);
    }
    auto h_of_s = [&model, &path, T, &opts](double s) {
        return adiabatic_hamiltonian(model, path, s, T, opts.gap_floor);
    };
    return adaptive_run(h_of_s, T, model.dim(), opts,
                        spectral_norm_estimate(model, path), steps_used);
}

Matrix ground_frame(const HamiltonianModel& model, const ControlPoint& x) {
    SpectralData sd = diagonalize(model, x);
    return sd.eigenvectors.leftCols(sd.g0);
}

PropagationResult propagate_pair(const HamiltonianModel& model,
                                 const Path& path, double T,
                                 const PropagationOptions& opts) {
    PropagationResult out;
    out.T = T;
    out.V = propagate(model, path, T, opts, &out.steps_V);
    out.V_ad = propagate_adiabatic(model, path, T, opts, &out.steps_V_ad);
    const int record = static_cast<int>(out.V.size());
    out.s.resize(static_cast<size_t>(record));
    for (int k = 0; k < record; ++k)
        out.s[static_cast<size_t>(k)] = static_cast<double>(k) / (record - 1);

    const double n = static_cast<double>(model.dim());
    out.delta = 0.0;
    out.fidelity.resize(out.s.size());
    for (size_t k = 0; k < out.s.size(); ++k) {
        out.delta = std::max(out.delta, operator_norm(out.V[k] - out.V_ad[k]));
        out.delta_frobenius = std::max(
            out.delta_frobenius, frobenius_norm(out.V[k] - out.V_ad[k]));
        out.fidelity[k] =
            std::abs((out.V_ad[k].adjoint() * out.V[k]).trace()) / n;
    }

    out.dynamical_phase = dynamical_phase(model, path, T);
    const Matrix f0 = ground_frame(model, path.start());
    const Matrix f1 = ground_frame(model, path.end());
    const Complex undo = std::exp(Complex(0.0, out.dynamical_phase));
    out.ground_block_V = undo * (f1.adjoint() * out.V.back() * f0);
    out.ground_block_V_ad = undo * (f1.adjoint() * out.V_ad.back() * f0);
    out.holonomy = polar_unitary(out.ground_block_V_ad);
    return out;
}

double adiabatic_error(const HamiltonianModel& model, const Path& path,
                       double T, const PropagationOptions& opts) {
    return propagate_pair(model, path, T, opts).delta;
}

double DysonLadder::remainder_norm() const {
    double worst = 0.0;
    for (size_t k = 0; k < s.size(); ++k) {
        Matrix sum = Matrix::Zero(omega[k].rows(), omega[k].cols());
        for (const auto& level : iterates) sum += level[k];
        worst = std::max(worst, operator_norm(omega[k] - sum));
    }
    return worst;
}

DysonLadder dyson_ladder(const HamiltonianModel& model, const Path& path,
                         double T, int L, const PropagationOptions& opts) {
    PropagationOptions fine = opts;
    fine.record = std::max(opts.record, 2049);
    PropagationResult pair = propagate_pair(model, path, T, fine);
    return dyson_ladder_from(pair, model, path, L, fine);
}

DysonLadder dyson_ladder_from(const PropagationResult& pair,
                              const HamiltonianModel& model, const Path& path,
                              int L, const PropagationOptions& opts) {
    if (L < 0 || L > 4) throw InvalidModel("iterate depth L must be in [0,4]");
    const int record = static_cast<int>(pair.s.size());
    const Index dim = model.dim();
    DysonLadder out;
    out.s = pair.s;
    out.omega.resize(static_cast<size_t>(record));
    std::vector<Matrix> kernel(static_cast<size_t>(record));
    out.kernel_norm.resize(static_cast<size_t>(record));
    for (int k = 0; k < record; ++k) {
        out.omega[static_cast<size_t>(k)] =
            pair.V_ad[static_cast<size_t>(k)].adjoint() *
            pair.V[static_cast<size_t>(k)];
        const Matrix comm = commutator_term(model, path,
                                            pair.s[static_cast<size_t>(k)],
                                            opts.gap_floor);
        kernel[static_cast<size_t>(k)] =
            pair.V_ad[static_cast<size_t>(k)].adjoint() * comm *
            pair.V_ad[static_cast<size_t>(k)];
        out.kernel_norm[static_cast<size_t>(k)] =
            operator_norm(kernel[static_cast<size_t>(k)]);
    }

    // Cumulative trapezoid ladder on the record grid, checked against the
    // half-resolution grid.
    auto build = [&](int stride) {
        std::vector<std::vector<Matrix>> lev(static_cast<size_t>(L) + 1);
        const int pts = (record - 1) / stride + 1;
        lev[0].assign(static_cast<size_t>(pts), Matrix::Identity(dim, dim));
        for (int l = 1; l <= L; ++l) {
            lev[static_cast<size_t>(l)].assign(static_cast<size_t>(pts),
                                               Matrix::Zero(dim, dim));
            for (int k = 1; k < pts; ++k) {
                const int a = (k - 1) * stride, b = k * stride;
                const double ds = pair.s[static_cast<size_t>(b)] -
                                  pair.s[static_cast<size_t>(a)];
                const Matrix inc =
                    -0.5 * ds *
                    (kernel[static_cast<size_t>(a)] *
                         lev[static_cast<size_t>(l - 1)][static_cast<size_t>(k - 1)] +
                     kernel[static_cast<size_t>(b)] *
                         lev[static_cast<size_t>(l - 1)][static_cast<size_t>(k)]);
                lev[static_cast<size_t>(l)][static_cast<size_t>(k)] =
                    lev[static_cast<size_t>(l)][static_cast<size_t>(k - 1)] + inc;
            }
        }
        return lev;
    };

    auto full = build(1);
    if (L >= 1 && (record - 1) % 2 == 0) {
        auto half = build(2);
        const double drift = operator_norm(full[1].back() - half[1].back());
        const double scale =
            std::max(operator_norm(full[1].back()), opts.local_tol);
        if (drift > 0.05 * scale + 1e-9)
            throw MeshTooCoarse("first-iterate quadrature has not converged; "
                                "raise PropagationOptions.record");
    }
    out.iterates = std::move(full);

    if (L >= 1)
        for (const Matrix& o1 : out.iterates[1])
            out.omega1_sup_norm =
                std::max(out.omega1_sup_norm, operator_norm(o1));
    for (int k = 1; k < record; ++k)
        out.eps_tilde_raw += 0.5 *
                             (out.kernel_norm[static_cast<size_t>(k - 1)] +
                              out.kernel_norm[static_cast<size_t>(k)]) *
                             (out.s[static_cast<size_t>(k)] -
                              out.s[static_cast<size_t>(k - 1)]);
    return out;
}

std::vector<double> operator_fidelity(const PropagationResult& result) {
    return result.fidelity;
}

double observable_deviation(const PropagationResult& result, const Matrix& O) {
    double worst = 0.0;
    for (size_t k = 0; k < result.s.size(); ++k) {
        const Matrix rotated = result.V[k] * O * result.V[k].adjoint();
        const Matrix rotated_ad =
            result.V_ad[k] * O * result.V_ad[k].adjoint();
        worst = std::max(worst, operator_norm(rotated - rotated_ad));
    }
    return worst;
}

Matrix wilczek_zee_holonomy(const HamiltonianModel& model, const Path& path,
                            int mesh, Matrix frame_start, Matrix frame_end,
                            double gap_floor) {
    if (mesh < 2) throw InvalidModel("mesh must be at least 2");
    if (frame_start.size() == 0) frame_start = ground_frame(model, path.start());
    if (frame_end.size() == 0) frame_end = ground_frame(model, path.end());
    const int g0 = static_cast<int>(frame_start.cols());
    const int g0_end = static_cast<int>(frame_end.cols());
    if (g0 != g0_end)
        throw FrameDegeneration("endpoint cluster ranks differ: " +
                                std::to_string(g0) + " vs " +
                                std::to_string(g0_end));

    // Transport d/ds G = [P0_dot, P0] G; the generator is gauge-free.
    auto gen = [&](double s) { return commutator_term(model, path, s, gap_floor); };
    const double h = 1.0 / (mesh - 1);
    Matrix g = frame_start;
    Matrix gen_left = gen(0.0);
    for (int k = 0; k + 1 < mesh; ++k) {
        const double s = k * h;
        const Matrix gen_mid = gen(s + 0.5 * h);
        const Matrix gen_right = gen(s + h);
        const Matrix k1 = gen_left * g;
        const Matrix k2 = gen_mid * (g + 0.5 * h * k1);
        const Matrix k3 = gen_mid * (g + 0.5 * h * k2);
        const Matrix k4 = gen_right * (g + h * k3);
        g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        gen_left = gen_right;
    }

    Matrix block = frame_end.adjoint() * g;  // g0 x g0
    const Matrix gram = block.adjoint() * block;
    const double defect =
        max_abs(gram - Matrix::Identity(g0, g0));
    if (defect > 1e-3)
        throw FrameDegeneration(
            "transported frame left the target cluster (defect " +
            std::to_string(defect) + "); a level crossing is likely");
    return polar_unitary(block);
}

Matrix adiabatic_generator(const HamiltonianModel& model, const ControlPoint& x,
                           const Vector& velocity, double T,
                           double gap_floor) {
    LocalGeometry geom = local_geometry(model, x, gap_floor);
    if (geom.spec.g0 != 1)
        throw DegenerateGround(
            "the parallel-transport generator is defined for a nondegenerate "
            "ground state");
    const Matrix h_dot = geom.h_dot(velocity);
    Matrix j = Complex(0.0, 1.0 / T) *
               (geom.spec.P0 * h_dot * geom.R - geom.R * h_dot * geom.spec.P0);
    return 0.5 * (j + j.adjoint());
}

double dynamical_phase(const HamiltonianModel& model, const Path& path,
                       double T, double rel_tol) {
    auto e0 = [&](double s) {
        return diagonalize(model, path.position(s)).E0;
    };
    return T * integrate_romberg(e0, 0.0, 1.0, rel_tol, 22);
}

}  // namespace adiageo
