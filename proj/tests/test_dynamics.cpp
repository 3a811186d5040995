#include <cmath>

#include "adiageo/dynamics.hpp"
#include "adiageo/errors.hpp"
#include "adiageo/metric.hpp"
#include "adiageo/models.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/util.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adiageo;
using namespace testsupport;

namespace {

HamiltonianModel constant_model(const Matrix& h0, int params = 1) {
    const Index dim = h0.rows();
    return HamiltonianModel(
        "constant", dim, params,
        [h0](const ControlPoint&) { return h0; },
        [dim](const ControlPoint&, int) {
            return Matrix(Matrix::Zero(dim, dim));
        });
}

HamiltonianModel grover4() {
    models::ProjectiveSpec spec;
    spec.dim = 4;
    spec.overlap = 0.5;
    return models::make_model(spec);
}

Path grover_linear_path(int knots = 129) {
    return Path::line(point2(1.0, 0.0), point2(0.0, 1.0), knots);
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("propagate: constant Hamiltonian exponential") {
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    HamiltonianModel model = constant_model(sz);
    Path still = Path::line(point1(0.0), point1(1.0), 9);
    auto v = propagate(model, still, 1.0);
    Matrix expected(2, 2);
    expected << std::exp(Complex(0, -1.0)), 0.0, 0.0, std::exp(Complex(0, 1.0));
    CHECK(max_abs(v.back() - expected) < 1e-9);
}

TEST_CASE("propagate: unitarity along a schedule") {
    HamiltonianModel model = grover4();
    auto v = propagate(model, grover_linear_path(), 50.0);
    for (const Matrix& vk : v)
        CHECK(max_abs(vk.adjoint() * vk - Matrix::Identity(4, 4)) < 1e-8);
}

TEST_CASE("propagate: fourth-order self convergence") {
    HamiltonianModel model = grover4();
    Path path = grover_linear_path();
    const double T = 10.0;
    Matrix ref = propagate_fixed(model, path, T, 16384).back();
    const double e1 = max_abs(propagate_fixed(model, path, T, 512).back() - ref);
    const double e2 = max_abs(propagate_fixed(model, path, T, 1024).back() - ref);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("propagate: step limit surfaces") {
    HamiltonianModel model = grover4();
    PropagationOptions opts;
    opts.max_steps = 128;
    opts.local_tol = 1e-14;
    CHECK_THROWS_AS(propagate(model, grover_linear_path(), 50.0, opts),
                    StepLimitExceeded);
}

TEST_CASE("adiabatic_hamiltonian") {
    SUBCASE("constant family: no correction") {
        std::mt19937_64 rng(3);
        Matrix h0 = random_hermitian(rng, 4);
        HamiltonianModel model = constant_model(h0);
        Path still = Path::line(point1(0.0), point1(1.0), 9);
        CHECK(max_abs(adiabatic_hamiltonian(model, still, 0.3, 7.0) - h0) <
              1e-12);
    }
    SUBCASE("correction scales as 1/T") {
        HamiltonianModel model = grover4();
        Path path = grover_linear_path();
        const Matrix h = model.evaluate(path.position(0.4));
        std::vector<double> norms;
        for (double T : {10.0, 20.0, 40.0, 80.0})
            norms.push_back(
                operator_norm(adiabatic_hamiltonian(model, path, 0.4, T) - h));
        for (size_t k = 0; k + 1 < norms.size(); ++k)
            CHECK(norms[k] / norms[k + 1] == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("differentiated intertwining identity") {
        HamiltonianModel model = grover4();
        Path path = grover_linear_path();
        const double s = 0.3, T = 17.0, h = 1e-6;
        const Matrix h_ad = adiabatic_hamiltonian(model, path, s, T);
        const Matrix p0 = diagonalize(model, path.position(s)).P0;
        const Matrix pp = diagonalize(model, path.position(s + h)).P0;
        const Matrix pm = diagonalize(model, path.position(s - h)).P0;
        const Matrix lhs = Complex(0, 1) * (pp - pm) / (2.0 * h);
        const Matrix rhs = T * (h_ad * p0 - p0 * h_ad);
        CHECK(max_abs(lhs - rhs) < 1e-7);
    }
}

TEST_CASE("propagate_adiabatic: intertwining and constant limit") {
    SUBCASE("constant family: V_ad equals V") {
        std::mt19937_64 rng(5);
        Matrix h0 = random_hermitian(rng, 3);
        HamiltonianModel model = constant_model(h0);
        Path still = Path::line(point1(0.0), point1(1.0), 9);
        auto v = propagate(model, still, 12.0);
        auto v_ad = propagate_adiabatic(model, still, 12.0);
        CHECK(max_abs(v.back() - v_ad.back()) < 1e-8);
    }
    SUBCASE("intertwining along the transverse-field chain") {
        models::IsingSpec spec;
        spec.m = 1;
        HamiltonianModel ising = models::make_model(spec);
        // transverse-field ramp; the interpolation line to (0,1) ends at the
        // doubly degenerate classical point and is not adiabatically posed
        Path path = Path::line(point2(1.0, 0.0), point2(1.0, 0.8), 129);
        auto v_ad = propagate_adiabatic(ising, path, 30.0);
        const Matrix p_start = diagonalize(ising, path.start()).P0;
        const int record = static_cast<int>(v_ad.size());
        for (int k = 0; k < record; k += 16) {
            const double s = static_cast<double>(k) / (record - 1);
            const Matrix p_s = diagonalize(ising, path.position(s)).P0;
            const Matrix moved = v_ad[static_cast<size_t>(k)] * p_start *
                                 v_ad[static_cast<size_t>(k)].adjoint();
            CHECK(operator_norm(moved - p_s) < 1e-7);
        }
    }
}

TEST_CASE("adiabatic_error") {
    SUBCASE("constant Hamiltonian: zero error") {
        std::mt19937_64 rng(7);
        Matrix h0 = random_hermitian(rng, 4);
        HamiltonianModel model = constant_model(h0);
        Path still = Path::line(point1(0.0), point1(1.0), 9);
        CHECK(adiabatic_error(model, still, 25.0) < 1e-8);
    }
    SUBCASE("error shrinks roughly as 1/T") {
        HamiltonianModel model = grover4();
        Path path = grover_linear_path();
        PropagationOptions opts;
        opts.local_tol = 1e-10;
        const double d25 = adiabatic_error(model, path, 25.0, opts);
        const double d100 = adiabatic_error(model, path, 100.0, opts);
        CHECK(d25 / d100 > 1.5);
        CHECK(d25 / d100 < 12.0);
    }
}

TEST_CASE("dyson ladder") {
    HamiltonianModel model = grover4();
    Path path = grover_linear_path();
    PropagationOptions opts;
    opts.local_tol = 1e-10;

    DysonLadder lad50 = dyson_ladder(model, path, 50.0, 2, opts);
    CHECK(max_abs(lad50.iterates[0].front() - Matrix::Identity(4, 4)) == 0.0);
    CHECK(max_abs(lad50.iterates[0].back() - Matrix::Identity(4, 4)) == 0.0);

    // || Omega_1(s) || <= cumulative integral of || K_T || (strict bound)
    double cum = 0.0;
    for (size_t k = 1; k < lad50.s.size(); k += 64) {
        cum = 0.0;
        for (size_t j = 1; j <= k; ++j)
            cum += 0.5 * (lad50.kernel_norm[j - 1] + lad50.kernel_norm[j]) *
                   (lad50.s[j] - lad50.s[j - 1]);
        CHECK(operator_norm(lad50.iterates[1][k]) <= cum + 1e-9);
    }
    CHECK(lad50.omega1_sup_norm <= lad50.eps_tilde_raw + 1e-9);

    // Larger T: closer truncation at the same depth.
    DysonLadder lad200 = dyson_ladder(model, path, 200.0, 1, opts);
    DysonLadder lad50_l1 = dyson_ladder(model, path, 50.0, 1, opts);
    CHECK(lad200.remainder_norm() < lad50_l1.remainder_norm());
}

TEST_CASE("operator fidelity") {
    SUBCASE("constant Hamiltonian: f = 1") {
        std::mt19937_64 rng(9);
        Matrix h0 = random_hermitian(rng, 4);
        HamiltonianModel model = constant_model(h0);
        Path still = Path::line(point1(0.0), point1(1.0), 9);
        PropagationResult pair = propagate_pair(model, still, 20.0);
        for (double f : operator_fidelity(pair))
            CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("lower bound from the error functional") {
        models::IsingSpec spec;
        spec.m = 1;
        HamiltonianModel ising = models::make_model(spec);
        Path path = Path::line(point2(1.0, 0.0), point2(1.0, 0.8), 129);
        PropagationResult pair = propagate_pair(ising, path, 40.0);
        PathErrorAccumulator eps = path_error_functional(ising, path, 1e-9);
        const double n = 8.0;
        for (size_t k = 0; k < pair.s.size(); k += 6) {
            const double bound = 1.0 - eps.at(pair.s[k]) / std::sqrt(n);
            CHECK(pair.fidelity[k] >= bound - 1e-9);
            CHECK(pair.fidelity[k] <= 1.0 + 1e-12);
        }
    }
    SUBCASE("final fidelity rises with T") {
        HamiltonianModel model = grover4();
        Path path = grover_linear_path();
        double prev = -1.0;
        for (double T : {10.0, 20.0, 40.0, 80.0, 160.0}) {
            PropagationResult pair = propagate_pair(model, path, T);
            const double f1 = pair.fidelity.back();
            CHECK(f1 > prev);
            prev = f1;
        }
    }
}

TEST_CASE("observable deviation") {
    models::IsingSpec spec;
    spec.m = 1;
    HamiltonianModel ising = models::make_model(spec);
    Path path = Path::line(point2(1.0, 0.1), point2(1.0, 0.75), 129);
    PropagationOptions opts;
    opts.local_tol = 1e-10;
    PropagationResult pair40 = propagate_pair(ising, path, 40.0, opts);

    SUBCASE("identity observable is untouched") {
        CHECK(observable_deviation(pair40, Matrix::Identity(8, 8)) < 1e-8);
    }
    SUBCASE("1/T scaling and the delta bound") {
        Matrix sz1 = Matrix::Zero(8, 8);
        for (Index b = 0; b < 8; ++b)
            sz1(b, b) = (b & 4) ? -1.0 : 1.0;  // site-0 z operator
        PropagationResult pair160 = propagate_pair(ising, path, 160.0, opts);
        const double dev40 = observable_deviation(pair40, sz1);
        const double dev160 = observable_deviation(pair160, sz1);
        CHECK(dev40 / dev160 > 2.0);
        CHECK(dev40 / dev160 < 8.0);
        CHECK(dev40 <= 2.0 * 1.0 * pair40.delta * 1.5);
    }
}

TEST_CASE("wilczek-zee holonomy") {
    SUBCASE("real symmetric family: real holonomy, no leakage") {
        std::mt19937_64 rng(21);
        Matrix a = random_hermitian(rng, 5);
        Matrix b = random_hermitian(rng, 5);
        Matrix a_re = a.real().cast<Complex>();
        Matrix b_re = b.real().cast<Complex>();
        HamiltonianModel model(
            "real_family", 5, 1,
            [a_re, b_re](const ControlPoint& x) {
                return Matrix(a_re + x(0) * b_re);
            },
            [b_re](const ControlPoint&, int) { return b_re; });
        Path path = Path::line(point1(0.0), point1(0.7), 65);
        Matrix hol = wilczek_zee_holonomy(model, path, 801);
        CHECK(std::abs(std::abs(hol(0, 0)) - 1.0) < 1e-8);
        CHECK(std::abs(hol(0, 0).imag()) < 1e-8);
    }
    SUBCASE("mesh doubling is converged") {
        models::DeutschJozsaSpec dj = models::dj_balanced(2, 13);
        HamiltonianModel model = models::make_model(dj);
        Path path = Path::line(point1(0.0), point1(1.0), 65);
        Matrix h1 = wilczek_zee_holonomy(model, path, 2001);
        Matrix h2 = wilczek_zee_holonomy(model, path, 4001);
        CHECK(max_abs(h1 - h2) < 1e-8);
    }
    SUBCASE("gauge covariance under endpoint frame rotations") {
        models::DeutschJozsaSpec dj = models::dj_balanced(2, 13);
        HamiltonianModel model = models::make_model(dj);
        Path path = Path::line(point1(0.0), point1(1.0), 65);
        Matrix f0 = ground_frame(model, path.start());
        Matrix f1 = ground_frame(model, path.end());
        Matrix base = wilczek_zee_holonomy(model, path, 1001, f0, f1);
        const Complex u = std::polar(1.0, 0.9);
        const Complex w = std::polar(1.0, -0.4);
        Matrix rotated =
            wilczek_zee_holonomy(model, path, 1001, Matrix(f0 * u), Matrix(f1 * w));
        CHECK(max_abs(rotated - Matrix(std::conj(w) * base * u)) < 1e-9);
    }
    SUBCASE("matches the adiabatic ground block") {
        models::DeutschJozsaSpec dj = models::dj_balanced(2, 13);
        HamiltonianModel model = models::make_model(dj);
        Path path = Path::line(point1(0.0), point1(1.0), 65);
        Matrix hol = wilczek_zee_holonomy(model, path, 4001);
        PropagationOptions opts;
        opts.local_tol = 1e-10;
        PropagationResult pair = propagate_pair(model, path, 100.0, opts);
        CHECK(max_abs(pair.ground_block_V_ad - hol) < 1e-5);
    }
}

TEST_CASE("adiabatic generator") {
    SUBCASE("constant family: zero generator") {
        std::mt19937_64 rng(31);
        Matrix h0 = random_hermitian(rng, 4);
        HamiltonianModel model = constant_model(h0, 2);
        Vector vel(2);
        vel << 0.4, -0.2;
        CHECK(max_abs(adiabatic_generator(model, point2(0.1, 0.2), vel, 9.0)) <
              1e-12);
    }
    SUBCASE("block and matrix-element identities") {
        HamiltonianModel model = random_affine_model(33);
        ControlPoint x = point2(0.3, -0.1);
        Vector vel(2);
        vel << 0.8, 0.5;
        const double T = 11.0;
        Matrix j = adiabatic_generator(model, x, vel, T);
        LocalGeometry geom = local_geometry(model, x);
        const Matrix p0 = geom.spec.P0;
        const Matrix p_dot = geom.p_dot(vel);
        const Matrix comm = p_dot * p0 - p0 * p_dot;
        CHECK(max_abs(Matrix(p0 * j + j * p0) -
                      Matrix(Complex(0, 1.0 / T) * comm)) < 1e-9);

        const ComplexVector ground = geom.spec.eigenvectors.col(0);
        CHECK(std::abs((ground.adjoint() * j * ground)(0)) < 1e-12);
        const Matrix h_dot = geom.h_dot(vel);
        for (Index k = 1; k < 6; ++k) {
            const ComplexVector exc = geom.spec.eigenvectors.col(k);
            const Complex lhs = (ground.adjoint() * j * exc)(0) *
                                Complex(0, -T) *
                                (geom.spec.eigenvalues(k) - geom.spec.E0);
            const Complex rhs = (ground.adjoint() * h_dot * exc)(0);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
    SUBCASE("links to the metric line element") {
        HamiltonianModel model = grover4();
        Path path = grover_linear_path();
        const double s = 0.4, T = 23.0;
        Vector x(2), vel(2);
        path.eval(s, x, vel);
        Matrix j = adiabatic_generator(model, x, vel, T);
        const Matrix p0 = diagonalize(model, x).P0;
        const double lhs = T * frobenius_norm(p0 * j + j * p0);
        RealMatrix g = metric_tensor(model, x);
        const double rhs = std::sqrt(2.0 * 1.0 * vel.dot(g * vel));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
    SUBCASE("degenerate ground state rejected") {
        HamiltonianModel degen = random_degenerate_model(35);
        Vector vel(2);
        vel << 1.0, 0.0;
        CHECK_THROWS_AS(
            adiabatic_generator(degen, point2(0.1, 0.3), vel, 5.0),
            DegenerateGround);
    }
}

TEST_SUITE_END();
