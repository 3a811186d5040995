#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adiageo/cli.hpp"
#include "adiageo/errors.hpp"
#include "adiageo/io.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

json model_flags_to_json(const std::string& name, int n,
                         const std::string& oracle, double h0, long dim,
                         double overlap, double phase1, int m,
                         const std::string& pcase, bool limit,
                         const std::string& model_file) {
    json model;
    model["name"] = name;
    if (name == "deutsch_jozsa" || name == "dj") {
        model["n"] = n;
        model["oracle"] = oracle;
        model["h0"] = h0;
    } else if (name == "projective" || name == "grover") {
        model["dim"] = dim;
        if (overlap > 0.0) model["overlap"] = overlap;
        if (phase1 != 0.0) model["phase1"] = phase1;
    } else if (name == "ising") {
        model["m"] = m;
        if (!pcase.empty()) model["case"] = pcase;
        if (limit) model["limit"] = true;
    } else if (name == "custom") {
        model["path"] = model_file;
    }
    return model;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemannian geometry of adiabatic evolution: metric fields, "
                 "geodesic schedules, exact propagation, scaling fits"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", model_name = "deutsch_jozsa";
    std::string oracle = "balanced:1", pcase, model_file;
    int n = 2, m = 1, workers = 0;
    long dim = 4, seed = 1;
    double h0 = 1.0, overlap = 0.0, phase1 = 0.0;
    bool limit = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers,
                        "worker pool size (or ADIAGEO_WORKERS)");
        sub->add_option("--seed", seed, "seed for randomized inputs");
        sub->add_option("--model", model_name,
                        "deutsch_jozsa | projective | ising | custom");
        sub->add_option("--n", n, "qubit count (deutsch_jozsa)");
        sub->add_option("--oracle", oracle,
                        "balanced:<seed> or constant:<0|1>");
        sub->add_option("--h0", h0, "energy scale (deutsch_jozsa)");
        sub->add_option("--dim", dim, "Hilbert dimension (projective)");
        sub->add_option("--overlap", overlap, "|<a|b>| (projective)");
        sub->add_option("--phase1", phase1, "phase of alpha_1 (projective)");
        sub->add_option("--m", m, "half-chain index (ising)");
        sub->add_option("--case", pcase, "ising parametrization: i|ii|iii");
        sub->add_flag("--limit", limit, "thermodynamic-limit metric (ising)");
        sub->add_option("--model-file", model_file, "custom model JSON");
    };

    // metric
    auto* metric = app.add_subcommand("metric", "metric field over a grid");
    add_common(metric);
    std::vector<double> grid_start{0.0}, grid_stop{1.0};
    std::vector<int> grid_count{101};
    bool grid_open = false, emit_json = false;
    metric->add_option("--grid-start", grid_start, "per-parameter grid start")
        ->delimiter(',');
    metric->add_option("--grid-stop", grid_stop, "per-parameter grid stop")
        ->delimiter(',');
    metric->add_option("--grid-count", grid_count, "per-parameter point count")
        ->delimiter(',');
    metric->add_flag("--grid-open", grid_open, "cell-centered, no endpoints");
    metric->add_flag("--json", emit_json, "also write metric.json");

    // geodesic
    auto* geodesic = app.add_subcommand("geodesic", "geodesic schedules");
    add_common(geodesic);
    std::string solver = "auto";
    int mesh = 801, knots = 257;
    std::vector<int> sweep_m;
    geodesic->add_option("--solver", solver, "auto | bvp | quadrature");
    geodesic->add_option("--mesh", mesh, "BVP mesh points");
    geodesic->add_option("--knots", knots, "output knot count");
    geodesic->add_option("--sweep-m", sweep_m, "ising chain sizes to sweep")
        ->delimiter(',');

    // propagate
    auto* propagate = app.add_subcommand("propagate", "exact propagation");
    add_common(propagate);
    std::vector<double> t_list{25, 50, 100, 200};
    std::string schedule_kind = "linear", schedule_case;
    std::vector<double> x0_flag, x1_flag;
    double tol_local = 1e-9;
    int record = 129;
    propagate->add_option("--T", t_list, "total evolution times")
        ->delimiter(',');
    propagate->add_option("--schedule", schedule_kind, "linear | geodesic");
    propagate->add_option("--schedule-case", schedule_case,
                          "ising case for geodesic schedules");
    propagate->add_option("--x0", x0_flag, "start point (linear schedule)")
        ->delimiter(',');
    propagate->add_option("--x1", x1_flag, "end point (linear schedule)")
        ->delimiter(',');
    propagate->add_option("--tol-local", tol_local, "integrator gate");
    propagate->add_option("--record", record, "recorded samples");

    // fit
    auto* fit = app.add_subcommand("fit", "power-law exponent fits");
    add_common(fit);
    std::string series_kind = "ising_geodesic_chi", series_path;
    double window_min = 0.0, window_max = 0.0, theory = std::nan("");
    fit->add_option("--series", series_kind,
                    "csv | ising_geodesic_chi | ising_metric_nu_kappa | "
                    "synthetic");
    fit->add_option("--series-path", series_path, "CSV input for --series csv");
    fit->add_option("--window-min", window_min, "fit window lower edge");
    fit->add_option("--window-max", window_max, "fit window upper edge");
    fit->add_option("--theory", theory, "theoretical exponent to compare");

    // models
    auto* models_cmd = app.add_subcommand("models", "list built-in models");
    (void)models_cmd;

    CLI11_PARSE(app, argc, argv);

    try {
        json config;
        if (!config_path.empty()) config = adiageo::load_json_file(config_path);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (!config.contains("command")) config["command"] = sub;
        if (sub != "models" && sub != "fit" && !config.contains("model"))
            config["model"] =
                model_flags_to_json(model_name, n, oracle, h0, dim, overlap,
                                    phase1, m, pcase, limit, model_file);
        if (workers > 0) config["workers"] = workers;

        if (sub == "metric" && !config.contains("grid")) {
            config["grid"] = {{"start", grid_start},
                              {"stop", grid_stop},
                              {"count", grid_count},
                              {"endpoints", !grid_open}};
            // ising case grids are one-dimensional in t
            if (config["model"].value("name", "") == "ising" &&
                config["model"].contains("case")) {
                config["grid"] = {{"start", grid_start.front()},
                                  {"stop", grid_stop.front()},
                                  {"count", grid_count.front()},
                                  {"endpoints", !grid_open}};
            }
        }
        if (sub == "geodesic") {
            if (!config.contains("solver")) config["solver"] = solver;
            if (!config.contains("mesh")) config["mesh"] = mesh;
            if (!config.contains("knots")) config["knots"] = knots;
            if (!sweep_m.empty() && !config.contains("sweep_m"))
                config["sweep_m"] = sweep_m;
        }
        if (sub == "propagate") {
            if (!config.contains("T")) config["T"] = t_list;
            if (!config.contains("schedule")) {
                json schedule{{"kind", schedule_kind}};
                if (!x0_flag.empty()) schedule["x0"] = x0_flag;
                if (!x1_flag.empty()) schedule["x1"] = x1_flag;
                if (!schedule_case.empty()) schedule["case"] = schedule_case;
                config["schedule"] = schedule;
            }
            if (!config.contains("tol_local")) config["tol_local"] = tol_local;
            if (!config.contains("record")) config["record"] = record;
        }
        if (sub == "fit" && !config.contains("series")) {
            json series{{"kind", series_kind}};
            if (!series_path.empty()) series["path"] = series_path;
            series["seed"] = seed;
            config["series"] = series;
            if (window_min > 0.0 && window_max > 0.0)
                config["window"] = {{"min", window_min}, {"max", window_max}};
            if (!std::isnan(theory)) config["theory"] = theory;
        }

        adiageo::cli::RunConfig run = adiageo::cli::RunConfig::parse(config);
        adiageo::cli::CommandResult result = adiageo::cli::run_command(run);
        adiageo::cli::write_outputs(result, out_dir);
        std::cout << adiageo::dump_json(result.summary);
        return result.converged ? 0 : 1;
    } catch (const adiageo::Error& err) {
        std::cerr << adiageo::dump_json(
            {{"error", err.kind()}, {"message", err.what()}});
        return 1;
    } catch (const std::exception& err) {
        std::cerr << adiageo::dump_json(
            {{"error", "Unexpected"}, {"message", err.what()}});
        return 1;
    }
}
