#pragma once

#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/path.hpp"
#include "adiageo/types.hpp"

namespace adiageo {

struct PropagationOptions {
    double local_tol = 1e-9;   // step-doubling gate on the final-time state
    int record = 129;          // recorded sample count (including endpoints)
    long min_steps = 256;
    long max_steps = 1L << 24;
    // When false, integrate once at the heuristic step count without the
    // step-doubling verification; for like-for-like path comparisons.
    bool verify = true;
    double gap_floor = 1e-10;  // for the adiabatic generator assembly
    // H(s) and [P0_dot, P0](s) are smooth and T-independent, so they are
    // tabulated once on this grid and interpolated (quartic-accurate) inside
    // the integrator; 0 evaluates them directly at every stage.
    int table_points = 4097;
};

// Solution samples of i dV/ds = T H(x(s)) V on the record grid; fourth-order
// fixed-step integration with step doubling until the final state moves by
// less than local_tol, unitarity restored whenever the defect drifts.
std::vector<Matrix> propagate(const HamiltonianModel& model, const Path& path,
                              double T, const PropagationOptions& opts = {},
                              long* steps_used = nullptr);

// Fixed step count, no doubling; exposed for convergence-order checks.
std::vector<Matrix> propagate_fixed(const HamiltonianModel& model,
                                    const Path& path, double T, long steps,
                                    int record = 2);

// H_ad(s) = H(s) + i [P0_dot, P0] / T.
Matrix adiabatic_hamiltonian(const HamiltonianModel& model, const Path& path,
                             double s, double T, double gap_floor = 1e-10);

std::vector<Matrix> propagate_adiabatic(const HamiltonianModel& model,
                                        const Path& path, double T,
                                        const PropagationOptions& opts = {},
                                        long* steps_used = nullptr);

// Orthonormal ground-cluster frame (N x g0) at a control point; eigensolver
// gauge, deterministic per process.
Matrix ground_frame(const HamiltonianModel& model, const ControlPoint& x);

struct PropagationResult {
    double T = 0.0;
    std::vector<double> s;
    std::vector<Matrix> V;
    std::vector<Matrix> V_ad;
    double delta = 0.0;             // max over samples of ||V - V_ad||
    double delta_frobenius = 0.0;   // same in the Frobenius norm (diagnostic)
    std::vector<double> fidelity;   // |Tr[V_ad^dag V]| / N per sample
    double dynamical_phase = 0.0;   // T * integral of E0(x(s)) ds
    Matrix ground_block_V;          // F1^dag V(1) F0, dynamical phase removed
    Matrix ground_block_V_ad;
    Matrix holonomy;                // unitarized ground_block_V_ad
    long steps_V = 0, steps_V_ad = 0;
};

PropagationResult propagate_pair(const HamiltonianModel& model,
                                 const Path& path, double T,
                                 const PropagationOptions& opts = {});

double adiabatic_error(const HamiltonianModel& model, const Path& path,
                       double T, const PropagationOptions& opts = {});

// Iterated Volterra (perturbation-series) approximants to the wave operator
// Omega = V_ad^dag V, with kernel K_T = V_ad^dag [P0_dot, P0] V_ad.
struct DysonLadder {
    std::vector<double> s;
    std::vector<Matrix> omega;                 // exact wave operator samples
    std::vector<std::vector<Matrix>> iterates; // iterates[l][k], l = 0..L
    std::vector<double> kernel_norm;           // ||K_T(s_k)||
    double omega1_sup_norm = 0.0;              // sup_s ||Omega_1(s)||
    double eps_tilde_raw = 0.0;                // integral of ||K_T|| ds

    // max over samples of || Omega - sum_{l<=L} Omega_l ||
    double remainder_norm() const;
};

DysonLadder dyson_ladder(const HamiltonianModel& model, const Path& path,
                         double T, int L, const PropagationOptions& opts = {});

// Same ladder built on an existing propagation's record grid.
DysonLadder dyson_ladder_from(const PropagationResult& pair,
                              const HamiltonianModel& model, const Path& path,
                              int L, const PropagationOptions& opts = {});

std::vector<double> operator_fidelity(const PropagationResult& result);

// sup over samples of || V O V^dag - V_ad O V_ad^dag ||.
double observable_deviation(const PropagationResult& result, const Matrix& O);

// Non-Abelian holonomy of the ground cluster: the frame is transported with
// the gauge-free generator [P0_dot, P0] (no eigenvector gauge enters except
// through the endpoint reference frames), then expressed in those frames.
// Defaults: eigensolver frames at x(0) and x(1).
Matrix wilczek_zee_holonomy(const HamiltonianModel& model, const Path& path,
                            int mesh, Matrix frame_start = Matrix(),
                            Matrix frame_end = Matrix(),
                            double gap_floor = 1e-10);

// Parallel-transport generator with vanishing excited-excited block:
// J = (i/T)(P0 Hdot R - R Hdot P0); requires a nondegenerate ground state.
Matrix adiabatic_generator(const HamiltonianModel& model, const ControlPoint& x,
                           const Vector& velocity, double T,
                           double gap_floor = 1e-10);

double dynamical_phase(const HamiltonianModel& model, const Path& path,
                       double T, double rel_tol = 1e-11);

}  // namespace adiageo
