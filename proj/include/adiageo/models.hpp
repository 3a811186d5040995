#pragma once

#include <string>
#include <vector>

#include "adiageo/model.hpp"
#include "adiageo/types.hpp"
#include "json.hpp"

namespace adiageo::models {

// ---------------------------------------------------------------------------
// Deutsch-Jozsa unitary interpolation: H(x) = V(x) H0 V(x)^dag with
// V(x) = exp(i pi x G / 2), G|i> = (-1)^{f(i)}|i>, and H0 = h0 sum_k |-><-|_k.
// One control parameter; the metric is constant in x.

struct DeutschJozsaSpec {
    int n = 1;                  // qubits
    std::vector<int> oracle;    // truth table over {0,1}^n, entries 0/1
    double h0 = 1.0;

    bool is_constant() const;
    bool is_balanced() const;
    void validate() const;      // throws InvalidModel unless constant/balanced
};

DeutschJozsaSpec dj_balanced(int n, unsigned long long seed);
DeutschJozsaSpec dj_constant(int n, int value);

HamiltonianModel make_model(const DeutschJozsaSpec& spec);

// Closed form metric (constant in x).
double dj_metric(const DeutschJozsaSpec& spec);

// ---------------------------------------------------------------------------
// Projective family H(x) = x1 (I - |a><a|) + x2 (I - |b><b|), realized in the
// {|a>, |a_perp_1>, ...} basis where the dynamics is a 2x2 block.

struct ProjectiveSpec {
    Index dim = 4;
    double overlap = 0.5;    // |<a|b>| in (0, 1)
    double phase1 = 0.0;     // phase of alpha_1

    void validate() const;
};

HamiltonianModel make_model(const ProjectiveSpec& spec);

double projective_gap(const ProjectiveSpec& spec, const ControlPoint& x);
double projective_theta(const ProjectiveSpec& spec, const ControlPoint& x);
Matrix projective_ground_projector(const ProjectiveSpec& spec,
                                   const ControlPoint& x);

// Geodesic of the one-parameter family x = (1-t, t), t(0)=0, t(1)=1.
double projective_geodesic(const ProjectiveSpec& spec, double s);

// ---------------------------------------------------------------------------
// Transverse-field Ising chain on 2m+1 sites with periodic boundaries:
// H(x) = -sum_l [ x1 sigma_z^(l) + x2 sigma_x^(l) sigma_x^(l+1) ].
// Full-matrix mode builds the 2^(2m+1) dense Hamiltonian (m <= 5); analytic
// mode works through the pair-mode angles theta_l at any m.

enum class IsingCase { I, II, III };  // (1-t, t), (t, 1), (1, t)

struct IsingSpec {
    int m = 1;
    void validate() const;
};

HamiltonianModel make_model(const IsingSpec& spec);  // full matrix, 2 params

double ising_mode_momentum(const IsingSpec& spec, int l);  // 2 pi l / (2m+1)

// Pair-mode gap function lambda_l = sqrt((x1 - x2 cos z)^2 + x2^2 sin^2 z).
double ising_lambda(const IsingSpec& spec, int l, const ControlPoint& x);

// theta_l in [0, pi/2] with sin 2theta = x2 sin z / lambda and
// cos 2theta = (x1 - x2 cos z) / lambda.
double ising_theta(const IsingSpec& spec, int l, const ControlPoint& x);

// Analytic partials (d theta_l / d x_i).
Vector ising_theta_gradient(const IsingSpec& spec, int l,
                            const ControlPoint& x);

// Analytic 2x2 metric g_ij = sum_l d_i theta_l d_j theta_l.
RealMatrix ising_metric(const IsingSpec& spec, const ControlPoint& x);

// Analytic ground energy and quasiparticle gap (validated against the full
// matrix for m <= 2).
double ising_ground_energy(const IsingSpec& spec, const ControlPoint& x);
double ising_gap(const IsingSpec& spec, const ControlPoint& x);

// One-parameter pullback metrics. Case (i): p(t); cases (ii)/(iii): q(t).
double ising_p(const IsingSpec& spec, double t);
double ising_q(const IsingSpec& spec, double t);
double ising_p_prime(const IsingSpec& spec, double t);

// Thermodynamic-limit forms (per the sum -> integral replacement, constant
// prefactor dropped; geodesics are scale-invariant).
double ising_p_limit(double t);  // pi / (2 (1-t)^2 (1-2t)), reflected at 1/2
double ising_q_limit(double t);  // pi / (2 (1-t^2))

ControlPoint ising_case_point(IsingCase c, double t);
Vector ising_case_velocity(IsingCase c);

// Thermodynamic-limit geodesics: case (i) the tan^2 branches, (ii)/(iii)
// sin(pi s / 2).
double ising_geodesic_closed_form(IsingCase c, double s);

// ---------------------------------------------------------------------------
// Custom models: H(x) = sum_k coeff_k(x) * M_k with affine coefficients.

HamiltonianModel model_from_json(const nlohmann::json& doc);
HamiltonianModel load_custom_model(const std::string& path);

// Registry keyed by name ("deutsch_jozsa", "projective", "ising", "custom");
// `params` carries the structural parameters for the chosen family.
HamiltonianModel make_registered_model(const std::string& name,
                                       const nlohmann::json& params);
std::vector<std::string> registered_model_names();

}  // namespace adiageo::models
