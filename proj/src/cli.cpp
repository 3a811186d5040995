#include "adiageo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "adiageo/dynamics.hpp"
#include "adiageo/errors.hpp"
#include "adiageo/geodesic.hpp"
#include "adiageo/io.hpp"
#include "adiageo/metric.hpp"
#include "adiageo/models.hpp"
#include "adiageo/scaling.hpp"
#include "adiageo/spectral.hpp"
#include "adiageo/util.hpp"

namespace adiageo::cli {

namespace {

using nlohmann::json;

void require_keys(const json& doc, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

void validate_model_block(const json& model) {
    require_keys(model, "model",
                 {"name", "n", "oracle", "h0", "dim", "overlap", "phase1", "m",
                  "case", "limit", "path", "model"});
    if (!model.contains("name"))
        throw ConfigError("model block needs a 'name'");
}

HamiltonianModel build_model(const json& model) {
    return models::make_registered_model(model.at("name").get<std::string>(),
                                         model);
}

bool is_ising_case(const json& model) {
    return model.value("name", "") == "ising" && model.contains("case");
}

models::IsingCase parse_case(const std::string& c) {
    if (c == "i") return models::IsingCase::I;
    if (c == "ii") return models::IsingCase::II;
    if (c == "iii") return models::IsingCase::III;
    throw ConfigError("ising case must be one of i, ii, iii");
}

// One-parameter pullback metric t -> p(t) for the reduced families the
// closed-form results live on.
std::function<double(double)> reduced_metric_fn(const json& model) {
    const std::string name = model.value("name", "");
    if (name == "ising") {
        models::IsingCase pcase = parse_case(model.value("case", "i"));
        if (model.value("limit", false)) {
            return pcase == models::IsingCase::I ? models::ising_p_limit
                                                 : models::ising_q_limit;
        }
        models::IsingSpec spec;
        spec.m = model.value("m", 1);
        if (pcase == models::IsingCase::I)
            return [spec](double t) { return models::ising_p(spec, t); };
        return [spec](double t) { return models::ising_q(spec, t); };
    }
    if (name == "projective" || name == "grover" || name == "deutsch_jozsa" ||
        name == "dj") {
        HamiltonianModel full = build_model(model);
        if (full.param_dim() == 1) {
            MetricField field = metric_field_of(full);
            return [field](double t) {
                ControlPoint x(1);
                x << t;
                return field(x)(0, 0);
            };
        }
        // projective family reduced to x = (1-t, t)
        MetricField field = metric_field_of(full);
        return [field](double t) {
            ControlPoint x(2);
            x << 1.0 - t, t;
            RealMatrix g = field(x);
            Vector v(2);
            v << -1.0, 1.0;
            return v.dot(g * v);
        };
    }
    throw ConfigError("no reduced parametrization for model '" + name + "'");
}

int workers_from(const json& doc) {
    return doc.value("workers", default_workers());
}

// ---------------------------------------------------------------------------

CommandResult cmd_models(const RunConfig&) {
    CommandResult out;
    json list = json::array();
    for (const auto& name : models::registered_model_names())
        list.push_back(name);
    out.summary = {{"models", list},
                   {"selectors",
                    {{"deutsch_jozsa", "--n <qubits> --oracle balanced:<seed>|constant:<0|1> [--h0 e]"},
                     {"projective", "--dim <N> --overlap <|<a|b>|> [--phase1 phi]"},
                     {"ising", "--m <half-chain> [--case i|ii|iii] [--limit]"},
                     {"custom", "--model-file <json>"}}}};
    return out;
}

CommandResult cmd_metric(const RunConfig& config) {
    const json& doc = config.doc();
    const json& model_doc = doc.at("model");
    const json& grid = doc.at("grid");
    require_keys(grid, "grid", {"start", "stop", "count", "endpoints"});
    const bool endpoints = grid.value("endpoints", true);

    CommandResult out;
    if (is_ising_case(model_doc)) {
        auto p = reduced_metric_fn(model_doc);
        const double start = grid.at("start").get<double>();
        const double stop = grid.at("stop").get<double>();
        const int count = grid.at("count").get<int>();
        models::IsingCase pcase = parse_case(model_doc.value("case", "i"));
        const bool limit = model_doc.value("limit", false);
        models::IsingSpec spec;
        spec.m = model_doc.value("m", 1);

        CsvWriter csv({"t", "x1", "x2", "g", "gap", "g0"});
        csv.add_comment("model", "ising case " + model_doc.value("case", "i") +
                                     (limit ? " (thermodynamic limit)"
                                            : " m=" + std::to_string(spec.m)));
        std::vector<std::vector<double>> rows(static_cast<size_t>(count));
        parallel_for_index(count, workers_from(doc), [&](int k) {
            const double t =
                endpoints
                    ? start + (stop - start) * k / (count - 1)
                    : start + (stop - start) * (k + 0.5) / count;
            const ControlPoint x = models::ising_case_point(pcase, t);
            double gap;
            if (limit)
                gap = pcase == models::IsingCase::I
                          ? 2.0 * std::abs(1.0 - 2.0 * t)
                          : 2.0 * std::abs(1.0 - t);
            else
                gap = models::ising_gap(spec, x);
            rows[static_cast<size_t>(k)] = {t, x(0), x(1), p(t), gap, 1.0};
        });
        for (const auto& row : rows) csv.add_row(row);
        out.files["metric.csv"] = csv.str();
        out.summary = {{"rows", count}, {"output", "metric.csv"}};
        return out;
    }

    HamiltonianModel model = build_model(model_doc);
    const int m = model.param_dim();
    const auto start = grid.at("start").get<std::vector<double>>();
    const auto stop = grid.at("stop").get<std::vector<double>>();
    const auto count = grid.at("count").get<std::vector<int>>();
    if (static_cast<int>(start.size()) != m ||
        static_cast<int>(stop.size()) != m ||
        static_cast<int>(count.size()) != m)
        throw ConfigError("grid arrays must have one entry per parameter");

    long total = 1;
    for (int c : count) total *= std::max(1, c);

    std::vector<std::string> columns;
    for (int i = 0; i < m; ++i) columns.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            columns.push_back("g" + std::to_string(i + 1) +
                              std::to_string(j + 1));
    columns.push_back("gap");
    columns.push_back("g0");
    CsvWriter csv(columns);
    csv.add_comment("model", model.name());

    std::vector<std::vector<double>> rows(static_cast<size_t>(total));
    parallel_for_index(static_cast<int>(total), workers_from(doc), [&](int flat) {
        ControlPoint x(m);
        long rem = flat;
        for (int i = m - 1; i >= 0; --i) {
            const int c = std::max(1, count[static_cast<size_t>(i)]);
            const int idx = static_cast<int>(rem % c);
            rem /= c;
            const double a = start[static_cast<size_t>(i)];
            const double b = stop[static_cast<size_t>(i)];
            x(i) = c == 1 ? a
                          : (endpoints ? a + (b - a) * idx / (c - 1)
                                       : a + (b - a) * (idx + 0.5) / c);
        }
        SpectralData sd = diagonalize(model, x);
        RealMatrix g = metric_tensor(model, x);
        std::vector<double> row;
        for (int i = 0; i < m; ++i) row.push_back(x(i));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) row.push_back(g(i, j));
        row.push_back(sd.gap);
        row.push_back(sd.g0);
        rows[static_cast<size_t>(flat)] = std::move(row);
    });
    for (const auto& row : rows) csv.add_row(row);
    out.files["metric.csv"] = csv.str();
    if (doc.value("json", false)) {
        json jrows = json::array();
        for (const auto& row : rows) {
            json r = json::object();
            for (size_t c = 0; c < columns.size(); ++c)
                r[columns[c]] = row[c];
            jrows.push_back(r);
        }
        out.files["metric.json"] = dump_json(jrows);
    }
    out.summary = {{"rows", total}, {"output", "metric.csv"}};
    return out;
}

// Path CSV with the schema shared by every geodesic output.
std::string path_csv(const Path& path, const json& meta,
                     const std::function<double(double, double)>& speed_of,
                     const PathErrorAccumulator* eps) {
    std::vector<std::string> columns{"s"};
    for (int i = 0; i < path.param_dim(); ++i)
        columns.push_back("x" + std::to_string(i + 1));
    columns.push_back("speed");
    columns.push_back("eps_cum");
    CsvWriter csv(columns);
    for (auto it = meta.begin(); it != meta.end(); ++it)
        csv.add_comment(it.key(),
                        it->is_string() ? it->get<std::string>() : it->dump());
    for (int k = 0; k < path.knot_count(); ++k) {
        const double s = path.knots_s()[static_cast<size_t>(k)];
        std::vector<double> row{s};
        const Vector& x = path.knots_x()[static_cast<size_t>(k)];
        const Vector& v = path.knots_v()[static_cast<size_t>(k)];
        for (int i = 0; i < path.param_dim(); ++i) row.push_back(x(i));
        row.push_back(speed_of(s, v.norm()));
        row.push_back(eps ? eps->at(s) : 0.0);
        csv.add_row(row);
    }
    return csv.str();
}

CommandResult cmd_geodesic(const RunConfig& config) {
    const json& doc = config.doc();
    const json& model_doc = doc.at("model");
    const std::string solver = doc.value("solver", "auto");
    const int knots = doc.value("knots", 257);

    CommandResult out;
    json report;
    report["solver"] = solver;

    auto emit_reduced = [&](const std::function<double(double)>& p,
                            const std::string& label, json meta) {
        Path path = solver == "bvp"
                        ? [&] {
                              MetricField field = [p](const ControlPoint& x) {
                                  RealMatrix g(1, 1);
                                  g(0, 0) = p(x(0));
                                  return g;
                              };
                              ControlPoint a(1), b(1);
                              a << 0.0;
                              b << 1.0;
                              GeodesicOptions opts;
                              opts.mesh = doc.value("mesh", 801);
                              return solve_geodesic(field, a, b, opts);
                          }()
                        : quadrature_geodesic_1d(p, 0.0, 1.0, knots);
        auto speed = [&p](double, double vnorm) { return vnorm; };
        meta["label"] = label;
        out.files["geodesic_" + label + ".csv"] = path_csv(path, meta, speed, nullptr);
        return path;
    };

    if (is_ising_case(model_doc)) {
        models::IsingCase pcase = parse_case(model_doc.value("case", "i"));
        std::vector<int> sweep =
            doc.value("sweep_m", std::vector<int>{model_doc.value("m", 1)});
        // finite-m series
        std::vector<Path> paths(sweep.size());
        parallel_for_index(static_cast<int>(sweep.size()), workers_from(doc),
                           [&](int idx) {
                               models::IsingSpec spec;
                               spec.m = sweep[static_cast<size_t>(idx)];
                               auto p = pcase == models::IsingCase::I
                                            ? std::function<double(double)>(
                                                  [spec](double t) {
                                                      return models::ising_p(spec, t);
                                                  })
                                            : std::function<double(double)>(
                                                  [spec](double t) {
                                                      return models::ising_q(spec, t);
                                                  });
                               paths[static_cast<size_t>(idx)] =
                                   quadrature_geodesic_1d(p, 0.0, 1.0, knots);
                           });
        json sup_distances = json::object();
        for (size_t idx = 0; idx < sweep.size(); ++idx) {
            const std::string label =
                "m" + std::to_string(sweep[idx]);
            json meta{{"model", "ising case " + model_doc.value("case", "i")},
                      {"m", sweep[idx]},
                      {"endpoints", "[0,1]"},
                      {"solver", "arc-length quadrature"},
                      {"knots", knots}};
            auto speed = [](double, double vnorm) { return vnorm; };
            out.files["geodesic_" + label + ".csv"] =
                path_csv(paths[idx], meta, speed, nullptr);
            double sup = 0.0;
            for (int k = 0; k <= 400; ++k) {
                const double s = k / 400.0;
                sup = std::max(sup,
                               std::abs(paths[idx].position(s)(0) -
                                        models::ising_geodesic_closed_form(pcase, s)));
            }
            sup_distances[label] = sup;
        }
        // thermodynamic-limit series
        {
            CsvWriter csv({"s", "x"});
            csv.add_comment("model", "ising closed-form limit");
            for (int k = 0; k < knots; ++k) {
                const double s = static_cast<double>(k) / (knots - 1);
                csv.add_row(std::vector<double>{
                    s, models::ising_geodesic_closed_form(pcase, s)});
            }
            out.files["geodesic_limit.csv"] = csv.str();
        }
        report["sup_distance_to_limit"] = sup_distances;
        out.summary = report;
        out.files["report.json"] = dump_json(report);
        return out;
    }

    const std::string name = model_doc.value("name", "");
    if (name == "deutsch_jozsa" || name == "dj") {
        HamiltonianModel model = build_model(model_doc);
        GeodesicOptions opts;
        opts.mesh = doc.value("mesh", 801);
        ControlPoint a(1), b(1);
        a << 0.0;
        b << 1.0;
        Path path = solve_geodesic(model, a, b, opts);
        const double residual =
            geodesic_residual(metric_field_of(model), path);
        json meta{{"model", model.name()},
                  {"x0", "0"},
                  {"x1", "1"},
                  {"mesh", std::to_string(opts.mesh)},
                  {"residual", format_double(residual)}};
        MetricField field = metric_field_of(model);
        auto speed = [&](double s, double vnorm) {
            ControlPoint x = path.position(s);
            return std::sqrt(field(x)(0, 0)) * vnorm;
        };
        PathErrorAccumulator eps = path_error_functional(model, path);
        out.files["geodesic.csv"] = path_csv(path, meta, speed, &eps);
        report["residual"] = residual;
        report["eps_total"] = eps.total();
        out.summary = report;
        out.files["report.json"] = dump_json(report);
        return out;
    }
    if (name == "projective" || name == "grover") {
        auto p = reduced_metric_fn(model_doc);
        Path path = emit_reduced(
            p, "projective",
            json{{"model", "projective (1-t, t)"},
                 {"endpoints", "[0,1]"},
                 {"solver", solver == "bvp" ? "bvp" : "arc-length quadrature"}});
        models::ProjectiveSpec spec;
        spec.dim = model_doc.value("dim", 4);
        spec.overlap =
            model_doc.value("overlap", 1.0 / std::sqrt(double(spec.dim)));
        double sup = 0.0;
        for (int k = 0; k <= 400; ++k) {
            const double s = k / 400.0;
            sup = std::max(sup, std::abs(path.position(s)(0) -
                                         models::projective_geodesic(spec, s)));
        }
        report["sup_distance_to_closed_form"] = sup;
        out.summary = report;
        out.files["report.json"] = dump_json(report);
        return out;
    }
    throw ConfigError("geodesic command supports deutsch_jozsa, projective, "
                      "and ising case models");
}

Path schedule_path(const json& schedule, const json& model_doc) {
    require_keys(schedule, "schedule", {"kind", "x0", "x1", "case", "knots"});
    const std::string kind = schedule.value("kind", "linear");
    const int knots = schedule.value("knots", 257);
    if (kind == "linear") {
        const auto x0v = schedule.at("x0").get<std::vector<double>>();
        const auto x1v = schedule.at("x1").get<std::vector<double>>();
        Vector x0(static_cast<Index>(x0v.size())), x1(static_cast<Index>(x1v.size()));
        for (size_t i = 0; i < x0v.size(); ++i) x0(static_cast<Index>(i)) = x0v[i];
        for (size_t i = 0; i < x1v.size(); ++i) x1(static_cast<Index>(i)) = x1v[i];
        return Path::line(x0, x1, knots);
    }
    if (kind == "geodesic") {
        const std::string name = model_doc.value("name", "");
        if (name == "deutsch_jozsa" || name == "dj") {
            Vector a(1), b(1);
            a << 0.0;
            b << 1.0;
            return Path::line(a, b, knots);  // flat metric: x(s) = s
        }
        if (name == "projective" || name == "grover") {
            models::ProjectiveSpec spec;
            spec.dim = model_doc.value("dim", 4);
            spec.overlap =
                model_doc.value("overlap", 1.0 / std::sqrt(double(spec.dim)));
            return Path::scalar_schedule(
                [spec](double s) { return models::projective_geodesic(spec, s); },
                [](double t) {
                    Vector x(2);
                    x << 1.0 - t, t;
                    return x;
                },
                [](double) {
                    Vector v(2);
                    v << -1.0, 1.0;
                    return v;
                },
                knots);
        }
        if (name == "ising") {
            models::IsingSpec spec;
            spec.m = model_doc.value("m", 1);
            models::IsingCase pcase = parse_case(schedule.value("case", "i"));
            auto p = pcase == models::IsingCase::I
                         ? std::function<double(double)>([spec](double t) {
                               return models::ising_p(spec, t);
                           })
                         : std::function<double(double)>([spec](double t) {
                               return models::ising_q(spec, t);
                           });
            Path reduced = quadrature_geodesic_1d(p, 0.0, 1.0, knots);
            return Path::scalar_schedule(
                [reduced](double s) { return reduced.position(s)(0); },
                [pcase](double t) { return models::ising_case_point(pcase, t); },
                [pcase](double) { return models::ising_case_velocity(pcase); },
                knots);
        }
        throw ConfigError("no built-in geodesic schedule for model '" + name +
                          "'");
    }
    throw ConfigError("schedule kind must be linear or geodesic");
}

CommandResult cmd_propagate(const RunConfig& config) {
    const json& doc = config.doc();
    const json& model_doc = doc.at("model");
    HamiltonianModel model = build_model(model_doc);
    Path path = schedule_path(doc.at("schedule"), model_doc);

    std::vector<double> t_list = doc.at("T").get<std::vector<double>>();
    PropagationOptions opts;
    opts.local_tol = doc.value("tol_local", 1e-9);
    opts.record = doc.value("record", 129);

    const double eps_total = path_error_functional(model, path).total();
    const double eps_tilde = path_error_sup(model, path).total();

    CommandResult out;
    std::vector<json> records(t_list.size());
    std::vector<std::string> series(t_list.size());
    std::vector<int> failed(t_list.size(), 0);
    parallel_for_index(static_cast<int>(t_list.size()), workers_from(doc),
                       [&](int idx) {
        const double T = t_list[static_cast<size_t>(idx)];
        try {
            PropagationResult pair = propagate_pair(model, path, T, opts);
            DysonLadder ladder = dyson_ladder(model, path, T, 1, opts);
            json rec;
            rec["T"] = T;
            rec["model"] = model.name();
            rec["steps_V"] = pair.steps_V;
            rec["steps_V_ad"] = pair.steps_V_ad;
            rec["delta"] = pair.delta;
            rec["delta_frobenius"] = pair.delta_frobenius;
            rec["schedule"] = doc.at("schedule");
            rec["fidelity_final"] = pair.fidelity.back();
            rec["eps"] = eps_total;
            rec["eps_tilde"] = eps_tilde;
            rec["omega1_sup_norm"] = ladder.omega1_sup_norm;
            json hol_re = json::array(), hol_im = json::array();
            for (Index r = 0; r < pair.holonomy.rows(); ++r)
                for (Index c = 0; c < pair.holonomy.cols(); ++c) {
                    hol_re.push_back(pair.holonomy(r, c).real());
                    hol_im.push_back(pair.holonomy(r, c).imag());
                }
            rec["holonomy_re"] = hol_re;
            rec["holonomy_im"] = hol_im;
            records[static_cast<size_t>(idx)] = rec;

            CsvWriter csv({"s", "fidelity", "deviation_norm"});
            csv.add_comment("T", format_double(T));
            for (size_t k = 0; k < pair.s.size(); ++k)
                csv.add_row(std::vector<double>{
                    pair.s[k], pair.fidelity[k],
                    operator_norm(pair.V[k] - pair.V_ad[k])});
            series[static_cast<size_t>(idx)] = csv.str();
        } catch (const Error& err) {
            failed[static_cast<size_t>(idx)] = 1;
            records[static_cast<size_t>(idx)] =
                json{{"T", T}, {"error", err.kind()}, {"message", err.what()}};
        }
    });

    json summary;
    summary["runs"] = json::array();
    std::vector<std::pair<double, double>> delta_series;
    for (size_t idx = 0; idx < t_list.size(); ++idx) {
        std::string label = "T" + format_double(t_list[idx]);
        std::replace(label.begin(), label.end(), '.', 'p');
        out.files["run_" + label + ".json"] = dump_json(records[idx]);
        if (!series[idx].empty())
            out.files["series_" + label + ".csv"] = series[idx];
        summary["runs"].push_back(records[idx]);
        if (!failed[idx])
            delta_series.emplace_back(t_list[idx],
                                      records[idx]["delta"].get<double>());
        else
            out.converged = false;
    }
    if (delta_series.size() >= 5) {
        FitWindow window{*std::min_element(t_list.begin(), t_list.end()) * 0.99,
                         *std::max_element(t_list.begin(), t_list.end()) * 1.01};
        PowerLawFit fit = fit_power_law(delta_series, window);
        summary["delta_slope"] = fit.exponent;
    } else if (delta_series.size() >= 2) {
        // two-point slope when the T list is short
        const auto& lo = delta_series.front();
        const auto& hi = delta_series.back();
        summary["delta_slope"] =
            std::log(hi.second / lo.second) / std::log(hi.first / lo.first);
    }
    out.summary = summary;
    out.files["summary.json"] = dump_json(summary);
    return out;
}

CommandResult cmd_fit(const RunConfig& config) {
    const json& doc = config.doc();
    const json& series_doc = doc.at("series");
    require_keys(series_doc, "series",
                 {"kind", "path", "t_column", "y_column", "exponent",
                  "prefactor", "noise", "count", "seed"});
    const std::string kind = series_doc.at("kind").get<std::string>();

    std::vector<std::pair<double, double>> samples;
    double theory = doc.value("theory", std::nan(""));
    if (kind == "csv") {
        samples = load_series_csv(series_doc.at("path").get<std::string>(),
                                  series_doc.value("t_column", 0),
                                  series_doc.value("y_column", 1));
    } else if (kind == "ising_geodesic_chi") {
        for (int k = 0; k < 80; ++k) {
            const double u = 1e-3 * std::pow(100.0, k / 79.0);
            const double x = models::ising_geodesic_closed_form(
                models::IsingCase::I, 0.5 - u);
            samples.emplace_back(u, std::abs(x - 0.5));
        }
        if (std::isnan(theory)) theory = 2.0;  // chi = 2/(d nu)
    } else if (kind == "ising_metric_nu_kappa") {
        for (int k = 0; k < 80; ++k) {
            const double t = 1e-4 * std::pow(100.0, k / 79.0);
            samples.emplace_back(t, models::ising_p_limit(0.5 - t));
        }
        if (std::isnan(theory)) theory = -1.0;  // nu kappa
    } else if (kind == "synthetic") {
        const double exponent = series_doc.value("exponent", 1.5);
        const double prefactor = series_doc.value("prefactor", 1.0);
        const double noise = series_doc.value("noise", 0.01);
        const int count = series_doc.value("count", 60);
        std::mt19937_64 rng(series_doc.value("seed", doc.value("seed", 1)));
        std::normal_distribution<double> gauss(0.0, noise);
        for (int k = 0; k < count; ++k) {
            const double t = 1e-3 * std::pow(100.0, double(k) / (count - 1));
            samples.emplace_back(
                t, prefactor * std::pow(t, exponent) * std::exp(gauss(rng)));
        }
        if (std::isnan(theory)) theory = exponent;
    } else {
        throw ConfigError("series kind must be csv, ising_geodesic_chi, "
                          "ising_metric_nu_kappa, or synthetic");
    }

    FitWindow window;
    if (doc.contains("window")) {
        require_keys(doc.at("window"), "window", {"min", "max"});
        window.t_min = doc.at("window").value("min", 1e-3);
        window.t_max = doc.at("window").value("max", 1e-1);
    } else if (kind == "ising_metric_nu_kappa") {
        window = FitWindow{1e-4, 1e-2};
    }
    PowerLawFit fit = fit_power_law(samples, window);

    json report;
    report["window"] = {{"min", window.t_min}, {"max", window.t_max}};
    report["samples"] = fit.samples_used;
    report["exponent"] = fit.exponent;
    report["stderr"] = fit.exponent_stderr;
    report["r2"] = fit.r_squared;
    if (!std::isnan(theory)) {
        report["theory"] = theory;
        report["abs_error"] = std::abs(fit.exponent - theory);
    }
    CommandResult out;
    out.summary = report;
    out.files["fit.json"] = dump_json(report);
    return out;
}

}  // namespace

RunConfig RunConfig::parse(const json& doc) {
    if (!doc.contains("command"))
        throw ConfigError("config needs a 'command'");
    const std::string command = doc.at("command").get<std::string>();
    RunConfig out;
    out.command_ = command;
    out.doc_ = doc;

    if (command == "models") {
        require_keys(doc, "config", {"command"});
    } else if (command == "metric") {
        require_keys(doc, "config",
                     {"command", "model", "grid", "out", "workers", "seed",
                      "json"});
        validate_model_block(doc.at("model"));
        if (!doc.contains("grid")) throw ConfigError("metric needs a grid");
    } else if (command == "geodesic") {
        require_keys(doc, "config",
                     {"command", "model", "solver", "mesh", "knots", "sweep_m",
                      "out", "workers", "seed"});
        validate_model_block(doc.at("model"));
    } else if (command == "propagate") {
        require_keys(doc, "config",
                     {"command", "model", "schedule", "T", "tol_local",
                      "record", "out", "workers", "seed"});
        validate_model_block(doc.at("model"));
        if (!doc.contains("schedule") || !doc.contains("T"))
            throw ConfigError("propagate needs schedule and T");
    } else if (command == "fit") {
        require_keys(doc, "config",
                     {"command", "series", "window", "theory", "out",
                      "workers", "seed"});
        if (!doc.contains("series")) throw ConfigError("fit needs a series");
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return out;
}

CommandResult run_command(const RunConfig& config) {
    const std::string& cmd = config.command();
    if (cmd == "models") return cmd_models(config);
    if (cmd == "metric") return cmd_metric(config);
    if (cmd == "geodesic") return cmd_geodesic(config);
    if (cmd == "propagate") return cmd_propagate(config);
    if (cmd == "fit") return cmd_fit(config);
    throw ConfigError("unknown command '" + cmd + "'");
}

void write_outputs(const CommandResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, contents] : result.files)
        write_text_file((std::filesystem::path(out_dir) / name).string(),
                        contents);
}

}  // namespace adiageo::cli
