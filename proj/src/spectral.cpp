#include "adiageo/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "adiageo/errors.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

namespace {

constexpr double kHermitianTol = 1e-12;

SpectralData decompose(const Matrix& h, double degeneracy_tol) {
    if (!is_finite(h))
        throw InvalidModel("Hamiltonian has non-finite entries");
    const double scale = std::max(1.0, max_abs(h));
    if (hermiticity_defect(h) > kHermitianTol * scale)
        throw InvalidModel("Hamiltonian is not Hermitian to tolerance");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("eigensolver did not converge");

    SpectralData out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.E0 = out.eigenvalues(0);
    out.h_norm = out.eigenvalues.cwiseAbs().maxCoeff();

    // Residual gate: max ||H v - lambda v||.
    const Matrix residual =
        h * out.eigenvectors -
        out.eigenvectors * out.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>();
    const double res = residual.colwise().norm().maxCoeff();
    if (res > 1e-9 * std::max(1.0, out.h_norm))
        throw NumericalFailure("eigen-residual exceeds tolerance");

    if (degeneracy_tol <= 0.0)
        degeneracy_tol = 1e-8 * std::max(1.0, out.h_norm);
    out.degeneracy_tol = degeneracy_tol;

    const Index n = h.rows();
    int g0 = 1;
    while (g0 < n && out.eigenvalues(g0) - out.E0 <= degeneracy_tol) ++g0;
    out.g0 = g0;
    out.gap = (g0 < n) ? out.eigenvalues(g0) - out.E0
                       : std::numeric_limits<double>::infinity();

    Matrix p = Matrix::Zero(n, n);
    for (int a = 0; a < g0; ++a)
        p += out.eigenvectors.col(a) * out.eigenvectors.col(a).adjoint();
    out.P0 = 0.5 * (p + p.adjoint());
    return out;
}

}  // namespace

SpectralData diagonalize(const HamiltonianModel& model, const ControlPoint& x,
                         double degeneracy_tol) {
    SpectralData out = decompose(model.evaluate(x), degeneracy_tol);
    out.x = x;
    return out;
}

SpectralData diagonalize_matrix(const Matrix& h, double degeneracy_tol) {
    return decompose(h, degeneracy_tol);
}

Matrix reduced_resolvent(const SpectralData& spec, double gap_floor) {
    if (!(spec.gap > gap_floor))
        throw GapCollapse("gap " + std::to_string(spec.gap) +
                          " at or below floor " + std::to_string(gap_floor));
    const Index n = spec.eigenvalues.size();
    Matrix r = Matrix::Zero(n, n);
    if (!std::isfinite(spec.gap)) return r;  // no excited levels
    for (Index k = spec.g0; k < n; ++k)
        r += spec.eigenvectors.col(k) * spec.eigenvectors.col(k).adjoint() /
             (spec.eigenvalues(k) - spec.E0);
    return r;
}

Matrix projector_derivative(const SpectralData& spec, const Matrix& dH,
                            double gap_floor) {
    const Matrix r = reduced_resolvent(spec, gap_floor);
    Matrix out = -(spec.P0 * dH * r + r * dH * spec.P0);
    return 0.5 * (out + out.adjoint());
}

Matrix projector_derivative(const HamiltonianModel& model,
                            const ControlPoint& x, int i, double gap_floor) {
    SpectralData spec = diagonalize(model, x);
    return projector_derivative(spec, model.partial(x, i), gap_floor);
}

double energy_derivative(const SpectralData& spec, const Matrix& dH) {
    return (spec.P0 * dH).trace().real() / spec.g0;
}

double energy_derivative(const HamiltonianModel& model, const ControlPoint& x,
                         int i) {
    SpectralData spec = diagonalize(model, x);
    return energy_derivative(spec, model.partial(x, i));
}

std::pair<double, double> commutator_norm_identity_check(
    const HamiltonianModel& model, const ControlPoint& x,
    const Vector& velocity, double gap_floor) {
    LocalGeometry geom = local_geometry(model, x, gap_floor);

    const Matrix p_dot = geom.p_dot(velocity);
    const Matrix comm = p_dot * geom.spec.P0 - geom.spec.P0 * p_dot;
    const double lhs = operator_norm(comm);

    const Matrix h_dot = geom.h_dot(velocity);
    const Matrix y =
        geom.spec.P0 * h_dot * geom.R * geom.R * h_dot * geom.spec.P0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (y + y.adjoint()));
    const double rhs = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    return {lhs, rhs};
}

Matrix LocalGeometry::h_dot(const Vector& velocity) const {
    Matrix out = Matrix::Zero(spec.P0.rows(), spec.P0.cols());
    for (size_t i = 0; i < dH.size(); ++i) out += velocity(static_cast<Index>(i)) * dH[i];
    return out;
}

Matrix LocalGeometry::p_dot(const Vector& velocity) const {
    Matrix out = Matrix::Zero(spec.P0.rows(), spec.P0.cols());
    for (size_t i = 0; i < dP.size(); ++i) out += velocity(static_cast<Index>(i)) * dP[i];
    return out;
}

LocalGeometry local_geometry(const HamiltonianModel& model,
                             const ControlPoint& x, double gap_floor) {
    LocalGeometry geom;
    geom.spec = diagonalize(model, x);
    geom.R = reduced_resolvent(geom.spec, gap_floor);
    geom.dH.reserve(static_cast<size_t>(model.param_dim()));
    geom.dP.reserve(static_cast<size_t>(model.param_dim()));
    for (int i = 0; i < model.param_dim(); ++i) {
        geom.dH.push_back(model.partial(x, i));
        Matrix dp = -(geom.spec.P0 * geom.dH.back() * geom.R +
                      geom.R * geom.dH.back() * geom.spec.P0);
        geom.dP.push_back(0.5 * (dp + dp.adjoint()));
    }
    return geom;
}

}  // namespace adiageo
