#pragma once

#include <Eigen/Dense>
#include <complex>

namespace adiageo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;      // dense N x N complex
using RealMatrix = Eigen::MatrixXd;   // dense real
using Vector = Eigen::VectorXd;       // real column vector
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// A point on the control manifold: M real couplings.
using ControlPoint = Eigen::VectorXd;

struct Tolerances {
    double degeneracy_tol_rel = 1e-8;  // scaled by max(1, ||H||)
    double gap_floor = 1e-10;
    double fd_step_rel = 1e-5;         // scaled by max(1, |x_i|)
};

}  // namespace adiageo
