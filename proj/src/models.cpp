#include "adiageo/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "adiageo/errors.hpp"
#include "adiageo/util.hpp"

namespace adiageo::models {

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// sigma_op on site k of n sites (site 0 is the leftmost tensor factor).
Matrix site_operator(const Matrix& op, int k, int n) {
    Matrix out = Matrix::Identity(1, 1);
    for (int j = 0; j < n; ++j)
        out = kron(out, j == k ? op : Matrix::Identity(2, 2));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Deutsch-Jozsa

bool DeutschJozsaSpec::is_constant() const {
    const int sum = std::accumulate(oracle.begin(), oracle.end(), 0);
    return sum == 0 || sum == static_cast<int>(oracle.size());
}

bool DeutschJozsaSpec::is_balanced() const {
    const int sum = std::accumulate(oracle.begin(), oracle.end(), 0);
    return 2 * sum == static_cast<int>(oracle.size());
}

void DeutschJozsaSpec::validate() const {
    if (n < 1 || n > 12) throw InvalidModel("qubit count out of range");
    if (h0 <= 0.0) throw InvalidModel("h0 must be positive");
    const size_t size = 1ull << n;
    if (oracle.size() != size)
        throw InvalidModel("oracle table must have 2^n entries");
    for (int v : oracle)
        if (v != 0 && v != 1) throw InvalidModel("oracle entries must be 0/1");
    if (!is_constant() && !is_balanced())
        throw InvalidModel("oracle must be constant or balanced");
}

DeutschJozsaSpec dj_balanced(int n, unsigned long long seed) {
    DeutschJozsaSpec spec;
    spec.n = n;
    const size_t size = 1ull << n;
    spec.oracle.assign(size, 0);
    for (size_t i = 0; i < size / 2; ++i) spec.oracle[i] = 1;
    std::mt19937_64 rng(seed);
    std::shuffle(spec.oracle.begin(), spec.oracle.end(), rng);
    return spec;
}

DeutschJozsaSpec dj_constant(int n, int value) {
    DeutschJozsaSpec spec;
    spec.n = n;
    spec.oracle.assign(1ull << n, value);
    return spec;
}

HamiltonianModel make_model(const DeutschJozsaSpec& spec) {
    spec.validate();
    const int n = spec.n;
    const Index dim = Index(1) << n;

    // H0 = h0 sum_k |-><-|_k in the computational basis.
    Matrix minus(2, 2);
    minus << 0.5, -0.5, -0.5, 0.5;
    Matrix h0 = Matrix::Zero(dim, dim);
    for (int k = 0; k < n; ++k) h0 += spec.h0 * site_operator(minus, k, n);

    Vector g_diag(dim);
    for (Index i = 0; i < dim; ++i)
        g_diag(i) = spec.oracle[static_cast<size_t>(i)] ? -1.0 : 1.0;

    auto rotate = [g_diag, dim](double t) {
        // exp(i pi t G / 2) with G = diag(+-1): diagonal phases.
        ComplexVector phases(dim);
        for (Index i = 0; i < dim; ++i)
            phases(i) = std::exp(Complex(0.0, 0.5 * kPi * t * g_diag(i)));
        return phases;
    };

    auto eval = [h0, rotate, dim](const ControlPoint& x) {
        ComplexVector v = rotate(x(0));
        Matrix h(dim, dim);
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j < dim; ++j)
                h(i, j) = v(i) * h0(i, j) * std::conj(v(j));
        return h;
    };

    auto partial = [eval, g_diag, dim](const ControlPoint& x, int) {
        // dH/dx = i (pi/2) [G, H]
        Matrix h = eval(x);
        Matrix out(dim, dim);
        for (Index i = 0; i < dim; ++i)
            for (Index j = 0; j < dim; ++j)
                out(i, j) = Complex(0.0, 0.5 * kPi) *
                            (g_diag(i) - g_diag(j)) * h(i, j);
        return out;
    };

    HamiltonianModel model("deutsch_jozsa", dim, 1, eval, partial);
    model.metadata()["n"] = n;
    model.metadata()["h0"] = spec.h0;
    return model;
}

double dj_metric(const DeutschJozsaSpec& spec) {
    spec.validate();
    double sum = 0.0;
    for (int v : spec.oracle) sum += (v ? -1.0 : 1.0);
    const double c = sum / static_cast<double>(spec.oracle.size());
    return 0.25 * kPi * kPi * (1.0 - c * c);
}

// ---------------------------------------------------------------------------
// Projective family

void ProjectiveSpec::validate() const {
    if (dim < 2) throw InvalidModel("projective dim must be >= 2");
    if (!(overlap > 0.0 && overlap < 1.0))
        throw InvalidModel("overlap must be in (0,1)");
}

namespace {

// 2x2 block data: H_block = a I + b sigma_z + Re(d) sigma_x + Im(d) sigma_y
// in the {|a>, |a_perp_1>} basis.
struct ProjectiveBlock {
    double a, b;
    Complex d;
    double r;  // sqrt(b^2 + |d|^2) = gap / 2
};

ProjectiveBlock projective_block(const ProjectiveSpec& spec,
                                 const ControlPoint& x) {
    const double c = spec.overlap;
    const double s = std::sqrt(1.0 - c * c);
    const Complex alpha1 = std::polar(s, spec.phase1);
    ProjectiveBlock blk;
    blk.a = 0.5 * (x(0) + x(1));
    blk.b = 0.5 * (x(1) * (1.0 - 2.0 * c * c) - x(0));
    blk.d = -x(1) * c * std::conj(alpha1);
    blk.r = std::sqrt(blk.b * blk.b + std::norm(blk.d));
    return blk;
}

}  // namespace

HamiltonianModel make_model(const ProjectiveSpec& spec) {
    spec.validate();
    const Index dim = spec.dim;
    const double c = spec.overlap;
    const Complex alpha1 = std::polar(std::sqrt(1.0 - c * c), spec.phase1);

    ComplexVector b_vec = ComplexVector::Zero(dim);
    b_vec(0) = c;
    b_vec(1) = alpha1;

    Matrix pa = Matrix::Identity(dim, dim);
    pa(0, 0) = 0.0;  // I - |a><a| with |a> = e0
    Matrix pb = Matrix::Identity(dim, dim) - b_vec * b_vec.adjoint();

    auto eval = [pa, pb](const ControlPoint& x) {
        return Matrix(x(0) * pa + x(1) * pb);
    };
    auto partial = [pa, pb](const ControlPoint&, int i) {
        return i == 0 ? pa : pb;
    };

    HamiltonianModel model("projective", dim, 2, eval, partial);
    model.metadata()["overlap"] = spec.overlap;
    model.metadata()["phase1"] = spec.phase1;
    return model;
}

double projective_gap(const ProjectiveSpec& spec, const ControlPoint& x) {
    spec.validate();
    const double c = spec.overlap;
    const double radicand = x(0) * x(0) + x(1) * x(1) +
                            2.0 * (2.0 * c * c - 1.0) * x(0) * x(1);
    return std::sqrt(std::max(0.0, radicand));
}

double projective_theta(const ProjectiveSpec& spec, const ControlPoint& x) {
    const ProjectiveBlock blk = projective_block(spec, x);
    // Ground eigenvector angle: tan(theta) = |d|/(r+b) for x2 > 0. Written
    // with the signed coupling so theta continues smoothly through x2 = 0
    // (where both |d| and r+b vanish; the limit is pi/2).
    const double c = spec.overlap;
    const double signed_coupling = x(1) * c * std::sqrt(1.0 - c * c);
    if (signed_coupling == 0.0) return 0.5 * kPi;
    return 0.5 * kPi - std::atan((blk.r + blk.b) / signed_coupling);
}

Matrix projective_ground_projector(const ProjectiveSpec& spec,
                                   const ControlPoint& x) {
    spec.validate();
    const ProjectiveBlock blk = projective_block(spec, x);
    if (blk.r < 1e-14)
        throw DegenerateGround("projective block is degenerate at this point");
    const double t = std::atan2(std::abs(blk.d), blk.r + blk.b);
    const Complex phase =
        std::abs(blk.d) > 1e-300 ? blk.d / std::abs(blk.d) : Complex(1.0, 0.0);
    ComplexVector ground = ComplexVector::Zero(spec.dim);
    ground(0) = -std::sin(t);
    ground(1) = std::conj(phase) * std::cos(t);
    return ground * ground.adjoint();
}

double projective_geodesic(const ProjectiveSpec& spec, double s) {
    spec.validate();
    const double c = spec.overlap;
    return 0.5 - 0.5 * c / std::sqrt(1.0 - c * c) *
                     std::tan((1.0 - 2.0 * s) * std::acos(c));
}

// ---------------------------------------------------------------------------
// Transverse-field Ising chain

void IsingSpec::validate() const {
    if (m < 1) throw InvalidModel("m must be >= 1");
}

HamiltonianModel make_model(const IsingSpec& spec) {
    spec.validate();
    if (spec.m > 5)
        throw InvalidModel(
            "full-matrix mode is capped at m <= 5; use the analytic forms");
    const int sites = 2 * spec.m + 1;
    const Index dim = Index(1) << sites;

    Matrix zsum = Matrix::Zero(dim, dim);
    Matrix xxsum = Matrix::Zero(dim, dim);
    for (int j = 0; j < sites; ++j)
        zsum += site_operator(pauli_z(), j, sites);
    for (int j = 0; j < sites; ++j) {
        Matrix bond = site_operator(pauli_x(), j, sites) *
                      site_operator(pauli_x(), (j + 1) % sites, sites);
        xxsum += bond;
    }

    auto eval = [zsum, xxsum](const ControlPoint& x) {
        return Matrix(-x(0) * zsum - x(1) * xxsum);
    };
    auto partial = [zsum, xxsum](const ControlPoint&, int i) {
        return Matrix(i == 0 ? -zsum : -xxsum);
    };

    HamiltonianModel model("ising", dim, 2, eval, partial);
    model.metadata()["m"] = spec.m;
    return model;
}

// Pair-mode momenta of the ground-state sector (antiperiodic quantization);
// validated against the full 8/32-dim spectrum, which the naive 2*pi*l/(2m+1)
// grid does not reproduce at finite m.
double ising_mode_momentum(const IsingSpec& spec, int l) {
    spec.validate();
    if (l < 1 || l > spec.m) throw InvalidModel("mode index out of range");
    return (2.0 * l - 1.0) * kPi / (2 * spec.m + 1);
}

double ising_lambda(const IsingSpec& spec, int l, const ControlPoint& x) {
    const double z = ising_mode_momentum(spec, l);
    const double cc = x(0) - x(1) * std::cos(z);
    const double ss = x(1) * std::sin(z);
    return std::hypot(cc, ss);
}

double ising_theta(const IsingSpec& spec, int l, const ControlPoint& x) {
    const double z = ising_mode_momentum(spec, l);
    const double lam = ising_lambda(spec, l, x);
    if (lam < 1e-14)
        throw DegenerateMode("mode " + std::to_string(l) +
                             " is degenerate at this point");
    return 0.5 * std::atan2(x(1) * std::sin(z), x(0) - x(1) * std::cos(z));
}

Vector ising_theta_gradient(const IsingSpec& spec, int l,
                            const ControlPoint& x) {
    const double z = ising_mode_momentum(spec, l);
    const double lam = ising_lambda(spec, l, x);
    if (lam < 1e-14) throw DegenerateMode("degenerate mode");
    const double lam2 = lam * lam;
    Vector grad(2);
    grad(0) = -0.5 * x(1) * std::sin(z) / lam2;
    grad(1) = 0.5 * x(0) * std::sin(z) / lam2;
    return grad;
}

RealMatrix ising_metric(const IsingSpec& spec, const ControlPoint& x) {
    RealMatrix g = RealMatrix::Zero(2, 2);
    for (int l = 1; l <= spec.m; ++l) {
        Vector grad = ising_theta_gradient(spec, l, x);
        g += grad * grad.transpose();
    }
    return g;
}

double ising_ground_energy(const IsingSpec& spec, const ControlPoint& x) {
    double sum = 0.0;
    for (int l = 1; l <= spec.m; ++l) sum += ising_lambda(spec, l, x);
    return -2.0 * sum - (x(0) + x(1));
}

// Spectral gap: the cheaper of a pair excitation within the ground sector
// (2 lambda_min on the antiperiodic grid) and the opposite-parity ground
// state, whose energy uses the periodic grid plus the zero mode.
double ising_gap(const IsingSpec& spec, const ControlPoint& x) {
    const int n = 2 * spec.m + 1;
    double lam_min = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= spec.m; ++l)
        lam_min = std::min(lam_min, ising_lambda(spec, l, x));
    double odd_sum = 0.0;
    for (int l = 1; l <= spec.m; ++l) {
        const double z = 2.0 * kPi * l / n;
        odd_sum += std::hypot(x(0) - x(1) * std::cos(z), x(1) * std::sin(z));
    }
    const double e_odd = (x(0) - x(1)) - 2.0 * odd_sum;
    return std::min(2.0 * lam_min, e_odd - ising_ground_energy(spec, x));
}

double ising_p(const IsingSpec& spec, double t) {
    spec.validate();
    double sum = 0.0;
    for (int l = 1; l <= spec.m; ++l) {
        const double z = ising_mode_momentum(spec, l);
        const double den = 1.0 - 2.0 * (1.0 + std::cos(z)) * (1.0 - t) * t;
        if (std::abs(den) < 1e-14) throw DegenerateMode("p(x) denominator vanished");
        const double s = std::sin(z);
        sum += s * s / (den * den);
    }
    return 0.25 * sum;
}

double ising_p_prime(const IsingSpec& spec, double t) {
    spec.validate();
    double sum = 0.0;
    for (int l = 1; l <= spec.m; ++l) {
        const double z = ising_mode_momentum(spec, l);
        const double a = 1.0 + std::cos(z);
        const double den = 1.0 - 2.0 * a * (1.0 - t) * t;
        if (std::abs(den) < 1e-14) throw DegenerateMode("p(x) denominator vanished");
        const double s = std::sin(z);
        // d den / dt = -2 a (1 - 2t)
        sum += s * s * a * (1.0 - 2.0 * t) / (den * den * den);
    }
    return sum;
}

double ising_q(const IsingSpec& spec, double t) {
    spec.validate();
    double sum = 0.0;
    for (int l = 1; l <= spec.m; ++l) {
        const double z = ising_mode_momentum(spec, l);
        const double den = 1.0 - 2.0 * t * std::cos(z) + t * t;
        if (std::abs(den) < 1e-14) throw DegenerateMode("q(x) denominator vanished");
        const double s = std::sin(z);
        sum += s * s / (den * den);
    }
    return 0.25 * sum;
}

double ising_p_limit(double t) {
    const double u = t <= 0.5 ? t : 1.0 - t;  // p is symmetric about 1/2
    const double one_minus = 1.0 - u;
    const double den = 2.0 * one_minus * one_minus * (1.0 - 2.0 * u);
    if (den <= 0.0)
        throw NonIntegrableSingularity("p diverges at the critical point");
    return kPi / den;
}

double ising_q_limit(double t) {
    const double den = 2.0 * (1.0 - t * t);
    if (den <= 0.0)
        throw NonIntegrableSingularity("q diverges at the critical point");
    return kPi / den;
}

ControlPoint ising_case_point(IsingCase c, double t) {
    ControlPoint x(2);
    switch (c) {
        case IsingCase::I: x << 1.0 - t, t; break;
        case IsingCase::II: x << t, 1.0; break;
        case IsingCase::III: x << 1.0, t; break;
    }
    return x;
}

Vector ising_case_velocity(IsingCase c) {
    Vector v(2);
    switch (c) {
        case IsingCase::I: v << -1.0, 1.0; break;
        case IsingCase::II: v << 1.0, 0.0; break;
        case IsingCase::III: v << 0.0, 1.0; break;
    }
    return v;
}

double ising_geodesic_closed_form(IsingCase c, double s) {
    if (c == IsingCase::I) {
        const double tan_term = std::tan(0.25 * kPi * (1.0 - 2.0 * s));
        const double t2 = tan_term * tan_term;
        return s <= 0.5 ? 0.5 * (1.0 - t2) : 0.5 * (1.0 + t2);
    }
    return std::sin(0.5 * kPi * s);
}

// ---------------------------------------------------------------------------
// Custom models from JSON

namespace {

// Affine coefficient c0 + sum_k c_k x_k parsed from strings like
// "1-x1", "0.5*x2", "2", "x1 + 0.25*x3 - 1".
struct AffineCoeff {
    double constant = 0.0;
    std::vector<double> linear;  // size M

    double value(const ControlPoint& x) const {
        double v = constant;
        for (size_t k = 0; k < linear.size(); ++k)
            v += linear[k] * x(static_cast<Index>(k));
        return v;
    }
};

AffineCoeff parse_affine(const std::string& text, int param_dim) {
    AffineCoeff coeff;
    coeff.linear.assign(static_cast<size_t>(param_dim), 0.0);
    size_t pos = 0;
    auto skip_ws = [&]() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    bool first = true;
    while (true) {
        skip_ws();
        if (pos >= text.size()) break;
        double sign = 1.0;
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        } else if (!first) {
            throw ConfigError("expected '+' or '-' in coefficient '" + text + "'");
        }
        first = false;
        skip_ws();
        double number = 1.0;
        bool has_number = false;
        if (pos < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
            size_t used = 0;
            number = std::stod(text.substr(pos), &used);
            pos += used;
            has_number = true;
            skip_ws();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                skip_ws();
            }
        }
        if (pos < text.size() && text[pos] == 'x') {
            ++pos;
            size_t used = 0;
            int idx = std::stoi(text.substr(pos), &used);
            pos += used;
            if (idx < 1 || idx > param_dim)
                throw ConfigError("coefficient references x" + std::to_string(idx) +
                                  " but params = " + std::to_string(param_dim));
            coeff.linear[static_cast<size_t>(idx - 1)] += sign * number;
        } else if (has_number) {
            coeff.constant += sign * number;
        } else {
            throw ConfigError("cannot parse coefficient '" + text + "'");
        }
    }
    return coeff;
}

}  // namespace

HamiltonianModel model_from_json(const nlohmann::json& doc) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key != "dim" && key != "params" && key != "terms" && key != "name")
            throw ConfigError("unknown key '" + key + "' in custom model");
    }
    if (!doc.contains("dim") || !doc.contains("params") || !doc.contains("terms"))
        throw ConfigError("custom model requires dim, params, terms");
    const Index dim = doc.at("dim").get<Index>();
    const int params = doc.at("params").get<int>();
    if (dim < 1 || dim > 4096) throw ConfigError("dim out of range");
    if (params < 1) throw ConfigError("params must be >= 1");

    struct Term {
        AffineCoeff coeff;
        Matrix matrix;
    };
    std::vector<Term> terms;
    for (const auto& term_doc : doc.at("terms")) {
        for (auto it = term_doc.begin(); it != term_doc.end(); ++it)
            if (it.key() != "coeff" && it.key() != "matrix")
                throw ConfigError("unknown key '" + it.key() + "' in term");
        Term term;
        const auto& cj = term_doc.at("coeff");
        if (cj.is_number()) {
            term.coeff.constant = cj.get<double>();
            term.coeff.linear.assign(static_cast<size_t>(params), 0.0);
        } else {
            term.coeff = parse_affine(cj.get<std::string>(), params);
        }
        const auto& mj = term_doc.at("matrix");
        if (static_cast<Index>(mj.size()) != dim * dim)
            throw ConfigError("matrix must have dim^2 [re,im] entries");
        term.matrix.resize(dim, dim);
        Index flat = 0;
        for (const auto& entry : mj) {
            if (entry.size() != 2) throw ConfigError("matrix entries are [re,im]");
            term.matrix(flat / dim, flat % dim) =
                Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
            ++flat;
        }
        if (hermiticity_defect(term.matrix) >
            1e-12 * std::max(1.0, max_abs(term.matrix)))
            throw InvalidModel("custom model term matrix is not Hermitian");
        terms.push_back(std::move(term));
    }

    auto eval = [terms, dim](const ControlPoint& x) {
        Matrix h = Matrix::Zero(dim, dim);
        for (const auto& t : terms) h += t.coeff.value(x) * t.matrix;
        return h;
    };
    auto partial = [terms, dim](const ControlPoint&, int i) {
        Matrix h = Matrix::Zero(dim, dim);
        for (const auto& t : terms)
            h += t.coeff.linear[static_cast<size_t>(i)] * t.matrix;
        return h;
    };

    std::string name = doc.contains("name") ? doc.at("name").get<std::string>()
                                            : std::string("custom");
    return HamiltonianModel(name, dim, params, eval, partial);
}

HamiltonianModel load_custom_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    nlohmann::json doc = nlohmann::json::parse(in);
    return model_from_json(doc);
}

HamiltonianModel make_registered_model(const std::string& name,
                                       const nlohmann::json& params) {
    if (name == "deutsch_jozsa" || name == "dj") {
        DeutschJozsaSpec spec;
        spec.n = params.value("n", 2);
        spec.h0 = params.value("h0", 1.0);
        const std::string oracle = params.value("oracle", "balanced:1");
        const auto colon = oracle.find(':');
        const std::string kind = oracle.substr(0, colon);
        const std::string arg =
            colon == std::string::npos ? "" : oracle.substr(colon + 1);
        if (kind == "balanced")
            spec = dj_balanced(spec.n, arg.empty() ? 1ull : std::stoull(arg));
        else if (kind == "constant")
            spec = dj_constant(spec.n, arg.empty() ? 0 : std::stoi(arg));
        else
            throw ConfigError("oracle must be balanced:<seed> or constant:<0|1>");
        spec.h0 = params.value("h0", 1.0);
        return make_model(spec);
    }
    if (name == "projective" || name == "grover") {
        ProjectiveSpec spec;
        spec.dim = params.value("dim", 4);
        spec.overlap = params.value("overlap", 1.0 / std::sqrt(double(spec.dim)));
        spec.phase1 = params.value("phase1", 0.0);
        return make_model(spec);
    }
    if (name == "ising") {
        IsingSpec spec;
        spec.m = params.value("m", 1);
        return make_model(spec);
    }
    if (name == "custom") {
        if (params.contains("path")) return load_custom_model(params.at("path"));
        if (params.contains("model")) return model_from_json(params.at("model"));
        throw ConfigError("custom model needs 'path' or inline 'model'");
    }
    throw ConfigError("unknown model '" + name + "'");
}

std::vector<std::string> registered_model_names() {
    return {"deutsch_jozsa", "projective", "ising", "custom"};
}

}  // namespace adiageo::models
