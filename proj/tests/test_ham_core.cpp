#include <cmath>

#include "adiageo/errors.hpp"
#include "adiageo/models.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/util.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adiageo;
using namespace testsupport;

TEST_SUITE_BEGIN("ham_core");

TEST_CASE("diagonalize: diagonal input") {
    Matrix h = Matrix::Zero(3, 3);
    h(2, 2) = 1.0;
    SpectralData spec = diagonalize_matrix(h, 1e-8);
    CHECK(std::abs(spec.E0) < 1e-14);
    CHECK(spec.g0 == 2);
    CHECK(spec.gap == doctest::Approx(1.0));
    CHECK(std::abs(spec.P0.trace().real() - 2.0) < 1e-8);
    CHECK(max_abs(spec.P0 * spec.P0 - spec.P0) < 1e-10);
    CHECK(hermiticity_defect(spec.P0) < 1e-10);
}

TEST_CASE("diagonalize: projective gap at the symmetric point") {
    models::ProjectiveSpec pspec;
    pspec.dim = 4;
    pspec.overlap = 0.5;
    HamiltonianModel model = models::make_model(pspec);
    SpectralData spec = diagonalize(model, point2(0.5, 0.5));
    CHECK(spec.gap == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("diagonalize: ising m=1 polarized point") {
    models::IsingSpec ispec;
    ispec.m = 1;
    HamiltonianModel model = models::make_model(ispec);
    SpectralData spec = diagonalize(model, point2(1.0, 0.0));
    CHECK(spec.E0 == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(spec.g0 == 1);
    CHECK(spec.gap == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("diagonalize: invariants over built-ins and random points") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(0.1, 1.5);
    std::vector<HamiltonianModel> zoo;
    zoo.push_back(models::make_model(models::dj_balanced(2, 7)));
    models::ProjectiveSpec pspec;
    pspec.dim = 8;
    pspec.overlap = 0.25;
    zoo.push_back(models::make_model(pspec));
    models::IsingSpec ispec;
    ispec.m = 1;
    zoo.push_back(models::make_model(ispec));
    for (int k = 0; k < 5; ++k) zoo.push_back(random_affine_model(100 + k));

    for (const auto& model : zoo) {
        for (int trial = 0; trial < 12; ++trial) {
            ControlPoint x(model.param_dim());
            for (int i = 0; i < model.param_dim(); ++i) x(i) = unif(rng);
            Matrix h = model.evaluate(x);
            CHECK(hermiticity_defect(h) <= 1e-12 * std::max(1.0, max_abs(h)));
            SpectralData spec = diagonalize(model, x);
            CHECK(max_abs(spec.P0 * spec.P0 - spec.P0) < 1e-10);
            CHECK(std::abs(spec.P0.trace().real() - spec.g0) < 1e-8);
            const Matrix res =
                h * spec.eigenvectors -
                spec.eigenvectors *
                    spec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>();
            CHECK(res.colwise().norm().maxCoeff() <
                  1e-9 * std::max(1.0, spec.h_norm));
        }
    }
}

TEST_CASE("diagonalize: rejects non-finite and non-Hermitian input") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = Complex(1.0, 0.0);  // not Hermitian
    CHECK_THROWS_AS(diagonalize_matrix(bad), InvalidModel);
    Matrix nan_mat = Matrix::Zero(2, 2);
    nan_mat(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(diagonalize_matrix(nan_mat), InvalidModel);
}

TEST_CASE("reduced_resolvent: diagonal spectrum") {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 2.0;
    SpectralData spec = diagonalize_matrix(h);
    Matrix r = reduced_resolvent(spec);
    Matrix expected = Matrix::Zero(3, 3);
    expected(1, 1) = 1.0;
    expected(2, 2) = 0.5;
    CHECK(max_abs(r - expected) < 1e-12);
}

TEST_CASE("reduced_resolvent: inverse property and norm bound") {
    HamiltonianModel model = random_affine_model(11);
    ControlPoint x = point2(0.3, -0.2);
    SpectralData spec = diagonalize(model, x);
    Matrix r = reduced_resolvent(spec);
    Matrix h = model.evaluate(x);

    CHECK(max_abs(r * spec.P0) < 1e-12);
    CHECK(max_abs(spec.P0 * r) < 1e-12);

    // R (H - E0) v = v for any v in the excited subspace.
    std::mt19937_64 rng(3);
    Matrix q0 = Matrix::Identity(6, 6) - spec.P0;
    for (int t = 0; t < 5; ++t) {
        ComplexVector v(6);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < 6; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        ComplexVector w = q0 * v;
        ComplexVector back =
            r * ((h - spec.E0 * Matrix::Identity(6, 6)) * w);
        CHECK((back - w).norm() < 1e-9 * w.norm());
    }

    CHECK(operator_norm(r) <= 1.0 / spec.gap + 1e-12);
}

TEST_CASE("reduced_resolvent: gap collapse rejected") {
    Matrix h = Matrix::Zero(2, 2);  // fully degenerate: infinite gap, R = 0
    SpectralData spec = diagonalize_matrix(h);
    CHECK(std::isinf(spec.gap));
    CHECK(max_abs(reduced_resolvent(spec)) == 0.0);

    // Near-degenerate excited level just above floor.
    Matrix h2 = Matrix::Zero(2, 2);
    h2(1, 1) = 1e-12;
    SpectralData spec2 = diagonalize_matrix(h2, 1e-14);
    CHECK_THROWS_AS(reduced_resolvent(spec2, 1e-10), GapCollapse);
}

TEST_CASE("projector_derivative: closed form for the oracle rotation family") {
    models::DeutschJozsaSpec spec = models::dj_balanced(2, 5);
    HamiltonianModel model = models::make_model(spec);
    ControlPoint x = point1(0.37);
    SpectralData sd = diagonalize(model, x);
    Matrix dp = projector_derivative(sd, model.partial(x, 0));

    Matrix g = Matrix::Zero(4, 4);
    for (Index i = 0; i < 4; ++i)
        g(i, i) = spec.oracle[static_cast<size_t>(i)] ? -1.0 : 1.0;
    Matrix expected =
        Complex(0.0, 0.5 * M_PI) * (g * sd.P0 - sd.P0 * g);
    CHECK(max_abs(dp - expected) < 1e-10);

    // P0 dP P0 = 0
    CHECK(max_abs(sd.P0 * dp * sd.P0) < 1e-10);
    CHECK(hermiticity_defect(dp) < 1e-10);
}

TEST_CASE("projector_derivative: matches central differences, gauge-free") {
    for (unsigned long long seed : {21ull, 22ull, 23ull}) {
        HamiltonianModel model = random_affine_model(seed);
        ControlPoint x = point2(0.4, 0.1);
        for (int i = 0; i < 2; ++i) {
            Matrix dp = projector_derivative(model, x, i);
            Matrix coarse = fd_projector_derivative(model, x, i, 2e-4);
            Matrix fine = fd_projector_derivative(model, x, i, 1e-4);
            const double err_coarse = max_abs(dp - coarse);
            const double err_fine = max_abs(dp - fine);
            CHECK(err_fine < 1e-6);
            // second-order: error drops by ~4 when h halves
            CHECK(err_coarse / err_fine == doctest::Approx(4.0).epsilon(0.2));
        }
    }
}

TEST_CASE("projector_derivative: constant family gives zero") {
    std::mt19937_64 rng(9);
    Matrix h0 = random_hermitian(rng, 5);
    HamiltonianModel constant(
        "constant", 5, 2, [h0](const ControlPoint&) { return h0; },
        [h0](const ControlPoint&, int) { return Matrix(Matrix::Zero(5, 5)); });
    CHECK(max_abs(projector_derivative(constant, point2(0.2, 0.8), 0)) <
          1e-12);
}

TEST_CASE("projector identities: product rule and commutator norms") {
    for (unsigned long long seed : {31ull, 32ull}) {
        HamiltonianModel model = random_affine_model(seed);
        ControlPoint x = point2(-0.1, 0.6);
        LocalGeometry geom = local_geometry(model, x);
        Vector v(2);
        v << 0.7, -0.4;
        Matrix p_dot = geom.p_dot(v);
        const Matrix& p0 = geom.spec.P0;
        CHECK(max_abs(p_dot - (p_dot * p0 + p0 * p_dot)) < 1e-9);

        Matrix comm = p_dot * p0 - p0 * p_dot;
        CHECK(std::abs(operator_norm(comm) - operator_norm(p_dot)) < 1e-8);
    }
}

TEST_CASE("energy_derivative") {
    models::IsingSpec ispec;
    ispec.m = 1;
    HamiltonianModel ising = models::make_model(ispec);
    CHECK(energy_derivative(ising, point2(1.0, 0.0), 0) ==
          doctest::Approx(-3.0).epsilon(1e-10));

    std::mt19937_64 rng(14);
    Matrix h0 = random_hermitian(rng, 4);
    HamiltonianModel constant(
        "constant", 4, 1, [h0](const ControlPoint&) { return h0; },
        [](const ControlPoint&, int) { return Matrix(Matrix::Zero(4, 4)); });
    CHECK(std::abs(energy_derivative(constant, point1(0.5), 0)) < 1e-14);

    HamiltonianModel model = random_affine_model(55);
    ControlPoint x = point2(0.25, -0.35);
    for (int i = 0; i < 2; ++i) {
        const double h = 1e-5;
        ControlPoint xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (diagonalize(model, xp).E0 -
                           diagonalize(model, xm).E0) /
                          (2.0 * h);
        CHECK(energy_derivative(model, x, i) ==
              doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("commutator norm identity: dual routes agree") {
    Vector v(2);
    v << 0.3, 0.9;

    SUBCASE("random model") {
        for (unsigned long long seed : {61ull, 62ull, 63ull}) {
            HamiltonianModel model = random_affine_model(seed);
            auto [lhs, rhs] =
                commutator_norm_identity_check(model, point2(0.2, 0.5), v);
            CHECK(std::abs(lhs - rhs) < 1e-8);
        }
    }
    SUBCASE("projective model along the interpolation line") {
        models::ProjectiveSpec pspec;
        pspec.dim = 4;
        pspec.overlap = 0.5;
        HamiltonianModel model = models::make_model(pspec);
        Vector vel(2);
        vel << -1.0, 1.0;
        auto [lhs, rhs] = commutator_norm_identity_check(
            model, point2(0.7, 0.3), vel);
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
    SUBCASE("constant family gives (0,0)") {
        std::mt19937_64 rng(77);
        Matrix h0 = random_hermitian(rng, 4);
        HamiltonianModel constant(
            "constant", 4, 2, [h0](const ControlPoint&) { return h0; },
            [](const ControlPoint&, int) { return Matrix(Matrix::Zero(4, 4)); });
        auto [lhs, rhs] =
            commutator_norm_identity_check(constant, point2(0.0, 0.0), v);
        CHECK(std::abs(lhs) < 1e-14);
        CHECK(std::abs(rhs) < 1e-14);
    }
}

TEST_CASE("finite-difference partials converge at second order") {
    HamiltonianModel model = random_smooth_model(81);
    ControlPoint x = point2(0.45, -0.8);
    for (int i = 0; i < 2; ++i) {
        Matrix exact = model.partial(x, i);
        const double e1 = max_abs(model.finite_difference_partial(x, i, 2e-3) - exact);
        const double e2 = max_abs(model.finite_difference_partial(x, i, 1e-3) - exact);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }
}

TEST_SUITE_END();
