#pragma once

#include <utility>
#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/types.hpp"

namespace adiageo {

// Exact diagonalization output at one control point. The ground "cluster" is
// the set of eigenvalues within degeneracy_tol of the lowest one; projectors,
// not eigenvectors, are what downstream code consumes (eigenvector gauge and
// ordering are arbitrary under degeneracy).
struct SpectralData {
    ControlPoint x;
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // orthonormal columns, matching order
    double E0 = 0.0;
    int g0 = 1;
    Matrix P0;
    double gap = 0.0;     // +inf when the spectrum is a single cluster
    double h_norm = 0.0;  // max |eigenvalue|
    double degeneracy_tol = 0.0;
};

SpectralData diagonalize(const HamiltonianModel& model, const ControlPoint& x,
                         double degeneracy_tol = -1.0);

// Direct form for tests and matrix-level callers.
SpectralData diagonalize_matrix(const Matrix& h, double degeneracy_tol = -1.0);

// Q0 (H - E0)^{-1} Q0: zero on the ground cluster, 1/(E_n - E0) on excited
// eigenvectors. Throws GapCollapse when gap <= gap_floor.
Matrix reduced_resolvent(const SpectralData& spec, double gap_floor = 1e-10);

// dP0/dx_i = -(P0 dH R + R dH P0) with R the reduced resolvent.
Matrix projector_derivative(const SpectralData& spec, const Matrix& dH,
                            double gap_floor = 1e-10);
Matrix projector_derivative(const HamiltonianModel& model,
                            const ControlPoint& x, int i,
                            double gap_floor = 1e-10);

// dE0/dx_i = Tr[dH P0] / g0.
double energy_derivative(const SpectralData& spec, const Matrix& dH);
double energy_derivative(const HamiltonianModel& model, const ControlPoint& x,
                         int i);

// Both sides of ||[P0_dot, P0]|| = sqrt(||P0 Hdot R^2 Hdot P0||) computed by
// independent routes (explicit commutator SVD vs resolvent form eigenvalue).
std::pair<double, double> commutator_norm_identity_check(
    const HamiltonianModel& model, const ControlPoint& x,
    const Vector& velocity, double gap_floor = 1e-10);

// Everything the metric/dynamics formulas need at one control point,
// assembled once: spectral data, all partials, the reduced resolvent, and
// projector derivatives.
struct LocalGeometry {
    SpectralData spec;
    std::vector<Matrix> dH;  // size M
    Matrix R;
    std::vector<Matrix> dP;  // size M

    Matrix h_dot(const Vector& velocity) const;
    Matrix p_dot(const Vector& velocity) const;
};

LocalGeometry local_geometry(const HamiltonianModel& model,
                             const ControlPoint& x,
                             double gap_floor = 1e-10);

}  // namespace adiageo
