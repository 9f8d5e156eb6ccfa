#include "symflow/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symflow/checkpoint.hpp"
#include "symflow/errors.hpp"
#include "symflow/fields.hpp"
#include "symflow/invariants.hpp"
#include "symflow/train.hpp"
#include "symflow/version.hpp"

namespace symflow::cli {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::uint64_t env_seed_or(std::uint64_t fallback) {
    if (const char* env = std::getenv("SYMFLOW_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            // fall through to the default
        }
    }
    return fallback;
}

std::vector<int> parse_hidden(const std::string& s) {
    std::vector<int> widths;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        widths.push_back(std::stoi(item));
    }
    return widths;
}

Json version_block() {
    Json v = Json::object();
    v["project"] = kProjectVersion;
    v["checkpoint_schema"] = kCheckpointSchema;
    return v;
}

void write_report(const std::string& out_dir, const std::string& command, std::uint64_t seed,
                  Json config, Json results) {
    if (out_dir.empty()) return;
    Json report = Json::object();
    report["command"] = command;
    report["version"] = version_block();
    report["seed"] = static_cast<std::int64_t>(seed);
    report["config"] = std::move(config);
    report["results"] = std::move(results);
    write_text_file((std::filesystem::path(out_dir) / "report.json").string(), report.dump());
}

/// --config JSON file: values apply wherever the flag was not given on the
/// command line.
nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--config", std::string("parse error: ") + e.what());
    }
    return j;
}

template <class T>
void merge_option(const CLI::App& app, const std::string& flag, const nlohmann::json& file,
                  const std::string& key, T& value) {
    if (app.count(flag) == 0 && file.contains(key)) value = file.at(key).get<T>();
}

struct TrainCli {
    std::string example;
    std::string kind;
    int epochs = 0;
    double lr = 0.0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int steps = 20;
    std::string hidden = "32,32";
    double delta_kick = 1e-2;
    bool include_time = false;
    int threads = 0;
    std::string out;
    std::string config_file;
};

TrainConfig to_train_config(const TrainCli& c) {
    TrainConfig cfg;
    cfg.example = example_from_string(c.example);
    if (!c.kind.empty()) cfg.kind = model_kind_from_string(c.kind);
    cfg.epochs = c.epochs;
    cfg.learning_rate = c.lr;
    cfg.seed = c.seed;
    cfg.n_steps = c.steps;
    cfg.hidden = parse_hidden(c.hidden);
    cfg.delta_kick = c.delta_kick;
    cfg.include_time = c.include_time;
    cfg.threads = c.threads;
    cfg.output_dir = c.out;
    return cfg;
}

int cmd_train(const TrainCli& c) {
    const TrainConfig cfg = resolved(to_train_config(c));
    const FitResult result = fit(cfg);

    Json results = Json::object();
    results["final_loss"] = result.history.final_loss;
    results["best_loss"] = result.history.best_loss;
    results["final_equiv_violation"] = result.history.final_equiv_violation;
    results["clamp_events"] = result.history.clamp_events;
    results["epochs_run"] = static_cast<std::int64_t>(result.history.rows.size());
    results["n_samples"] =
        static_cast<std::int64_t>(make_dataset(cfg.example, cfg.seed).inputs.size());
    write_report(cfg.output_dir, "train", cfg.seed, config_to_json(cfg), std::move(results));

    std::cout << "train " << to_string(cfg.example) << ": final loss "
              << format_double(result.history.final_loss) << ", best "
              << format_double(result.history.best_loss) << "\n";
    return kExitPass;
}

int cmd_eval(const std::string& checkpoint, std::string example_name, const std::string& out,
             std::uint64_t seed, int samples, double tol) {
    const NodeModel model = load_checkpoint(checkpoint);

    if (example_name.empty()) {
        // default to the example recorded in the checkpoint's config echo
        std::ifstream in(checkpoint);
        nlohmann::json j;
        in >> j;
        if (j.contains("config") && j.at("config").contains("example"))
            example_name = j.at("config").at("example").get<std::string>();
        else
            example_name = model.geometry == GeometryId::Sphere2 ? "sphere" : "radial";
    }
    const ExampleId example = example_from_string(example_name);
    const Dataset ds = make_dataset(example, seed);

    int flow_failures = 0;
    const double loss = dataset_loss(model, ds, &flow_failures);
    const EquivarianceReport eq = check_model_equivariance(model, samples, tol, seed);

    if (!out.empty())
        write_curves_csv((std::filesystem::path(out) / "curves.csv").string(),
                         curve_samples(model, ds));

    Json config = Json::object();
    config["checkpoint"] = checkpoint;
    config["example"] = example_name;
    config["samples"] = samples;
    config["tol"] = tol;
    Json results = Json::object();
    results["loss"] = loss;
    results["flow_failures"] = flow_failures;
    results["equiv_violation"] = eq.max_violation;
    results["equiv_pass"] = eq.pass;
    write_report(out, "eval", seed, std::move(config), std::move(results));

    std::cout << "eval: loss " << format_double(loss) << ", equivariance violation "
              << format_double(eq.max_violation) << (eq.pass ? " (pass)" : " (FAIL)") << "\n";
    return eq.pass ? kExitPass : kExitCheckFailed;
}

int cmd_check_invariants(const std::string& geometry_name, int order, int samples, double tol,
                         std::uint64_t seed, const std::string& out) {
    const Geometry g = geometry_from_name(geometry_name);
    const InvariantSet set = invariant_registry(g.id, order);
    const InvarianceReport rep = check_invariance(g, set.members, order, samples, tol, seed);

    Json config = Json::object();
    config["geometry"] = geometry_name;
    config["order"] = order;
    config["samples"] = samples;
    config["tol"] = tol;
    Json results = Json::object();
    results["set"] = set.label;
    results["mu"] = set.mu;
    results["max_infinitesimal"] = rep.max_infinitesimal;
    results["max_finite"] = rep.max_finite;
    results["pass"] = rep.pass;
    if (!rep.worst_label.empty()) results["worst"] = rep.worst_label;
    write_report(out, "check-invariants", seed, std::move(config), std::move(results));

    std::cout << "check-invariants " << set.label << ": |X(I)| max "
              << format_double(rep.max_infinitesimal) << ", |dI| max "
              << format_double(rep.max_finite) << (rep.pass ? " (pass)" : " (FAIL)") << "\n";
    return rep.pass ? kExitPass : kExitCheckFailed;
}

int cmd_check_equivariance(const std::string& geometry_name, const std::string& kind_name,
                           const std::string& checkpoint, int models, int pairs, double tol,
                           std::uint64_t seed, const std::string& hidden, const std::string& out) {
    double worst = 0.0;
    std::string label;
    if (!checkpoint.empty()) {
        const NodeModel m = load_checkpoint(checkpoint);
        worst = check_model_equivariance(m, pairs, tol, seed).max_violation;
        label = "checkpoint:" + checkpoint;
    } else {
        const Geometry g = geometry_from_name(geometry_name);
        const ModelKind kind = model_kind_from_string(kind_name);
        const std::vector<int> widths = parse_hidden(hidden);
        for (int i = 0; i < models; ++i) {
            const NodeModel m = make_model(g.id, kind, widths, seed + static_cast<std::uint64_t>(i));
            const auto rep =
                check_model_equivariance(m, pairs, tol, seed + 1000 + static_cast<std::uint64_t>(i));
            worst = std::max(worst, rep.max_violation);
        }
        label = geometry_name + "/" + kind_name;
    }
    const bool pass = worst < tol;

    Json config = Json::object();
    config["geometry"] = geometry_name;
    config["kind"] = kind_name;
    if (!checkpoint.empty()) config["checkpoint"] = checkpoint;
    config["models"] = models;
    config["pairs"] = pairs;
    config["tol"] = tol;
    Json results = Json::object();
    results["max_violation"] = worst;
    results["pass"] = pass;
    write_report(out, "check-equivariance", seed, std::move(config), std::move(results));

    std::cout << "check-equivariance " << label << ": max violation " << format_double(worst)
              << (pass ? " (pass)" : " (FAIL)") << "\n";
    return pass ? kExitPass : kExitCheckFailed;
}

int cmd_density(const std::string& checkpoint, const std::string& out, int grid,
                std::uint64_t seed) {
    const NodeModel model = load_checkpoint(checkpoint);
    const bool sphere = model.geometry == GeometryId::Sphere2;

    Density rho;
    if (sphere) {
        // phi-invariant chart density concentrated at the equator
        rho.label = "equator-gaussian";
        rho.eval = [](const Vec2& p) {
            const double d = p[0] - std::numbers::pi / 2.0;
            return std::exp(-d * d / (2.0 * 0.3 * 0.3));
        };
    } else {
        rho.label = "standard-gaussian";
        rho.eval = [](const Vec2& p) {
            const double r2 = p[0] * p[0] + p[1] * p[1];
            return std::exp(-r2 / 2.0) / (2.0 * std::numbers::pi);
        };
    }
    const Density rho_h = transform_density(model, rho);

    int no_preimage = 0;
    std::string csv = sphere ? "theta,phi,rho,rho_h\n" : "x,y,rho,rho_h\n";
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec2 p;
            if (sphere) {
                p = {0.2 + (std::numbers::pi - 0.4) * i / (grid - 1),
                     2.0 * std::numbers::pi * j / grid};
            } else {
                p = {-2.0 + 4.0 * i / (grid - 1), -2.0 + 4.0 * j / (grid - 1)};
            }
            double value = 0.0;
            // a point with no preimage in the chart carries no transformed mass
            try {
                value = rho_h.eval(p);
            } catch (const FlowLeftChartError&) {
                ++no_preimage;
            } catch (const DomainError&) {
                ++no_preimage;
            } catch (const ConvergenceError&) {
                ++no_preimage;
            }
            csv += csv_join({format_double(p[0]), format_double(p[1]),
                             format_double(rho.eval(p)), format_double(value)});
        }
    }
    write_text_file((std::filesystem::path(out) / "density.csv").string(), csv);

    Json config = Json::object();
    config["checkpoint"] = checkpoint;
    config["grid"] = grid;
    config["density"] = rho.label;
    Json results = Json::object();
    results["rows"] = grid * grid;
    results["no_preimage"] = no_preimage;
    write_report(out, "density", seed, std::move(config), std::move(results));

    std::cout << "density: wrote " << grid * grid << " rows (" << no_preimage
              << " without preimage)\n";
    return kExitPass;
}

int cmd_gradcheck(const std::string& geometry_name, const std::string& kind_name,
                  const std::string& hidden, int batch, int steps, double tol, std::uint64_t seed,
                  const std::string& out) {
    const Geometry g = geometry_from_name(geometry_name);
    const ModelKind kind = model_kind_from_string(kind_name);
    const NodeModel model = make_model(g.id, kind, parse_hidden(hidden), seed, steps);

    Rng rng(seed + 17);
    Batch b;
    for (int i = 0; i < batch; ++i) {
        Vec2 p;
        if (g.id == GeometryId::R2Punctured) {
            const double r = rng.uniform(0.6, 2.0);
            const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
            p = {r * std::cos(ang), r * std::sin(ang)};
            b.targets.push_back(ground_truth_map(ExampleId::Radial, p));
        } else {
            p = {rng.uniform(0.3, 1.1), rng.uniform(0.0, 2.0 * std::numbers::pi)};
            b.targets.push_back(ground_truth_map(ExampleId::Sphere, p));
        }
        b.inputs.push_back(p);
    }

    const GradCheckResult res = gradcheck(model, b, default_loss(g.id), 1e-5, tol);

    Json config = Json::object();
    config["geometry"] = geometry_name;
    config["kind"] = kind_name;
    config["hidden"] = hidden;
    config["batch"] = batch;
    config["steps"] = steps;
    config["tol"] = tol;
    Json results = Json::object();
    results["max_rel_error"] = res.max_rel_error;
    results["worst_index"] = static_cast<std::int64_t>(res.worst_index);
    results["tape_value"] = res.tape_value;
    results["fd_value"] = res.fd_value;
    results["pass"] = res.pass;
    write_report(out, "gradcheck", seed, std::move(config), std::move(results));

    std::cout << "gradcheck: max relative error " << format_double(res.max_rel_error)
              << (res.pass ? " (pass)" : " (FAIL)") << "\n";
    return res.pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"symflow: equivariant manifold neural ODEs"};
    app.require_subcommand(1);

    // ---- train -------------------------------------------------------------
    TrainCli tc;
    CLI::App* train_cmd = app.add_subcommand("train", "Train one of the three experiments");
    train_cmd->add_option("--example", tc.example, "radial | sphere | inverse-radius")
        ->required();
    train_cmd->add_option("--kind", tc.kind, "plain | augmented (default per example)");
    train_cmd->add_option("--epochs", tc.epochs, "epochs (default per example)");
    train_cmd->add_option("--lr", tc.lr, "learning rate (default per kind)");
    auto* train_seed = train_cmd->add_option("--seed", tc.seed, "RNG seed");
    train_cmd->add_option("--steps", tc.steps, "RK4 steps over [0,1]");
    train_cmd->add_option("--hidden", tc.hidden, "comma-separated hidden widths");
    train_cmd->add_option("--delta-kick", tc.delta_kick, "augmented lift kick magnitude");
    train_cmd->add_flag("--include-time", tc.include_time, "feed t to A and B");
    train_cmd->add_option("--threads", tc.threads, "gradient worker threads");
    train_cmd->add_option("--out", tc.out, "output directory")->required();
    train_cmd->add_option("--config", tc.config_file, "JSON file supplying any flag");

    // ---- eval --------------------------------------------------------------
    std::string ev_checkpoint, ev_example, ev_out;
    std::uint64_t ev_seed = 0;
    int ev_samples = 100;
    double ev_tol = 1e-5;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against its dataset");
    eval_cmd->add_option("--checkpoint", ev_checkpoint, "checkpoint.json path")->required();
    eval_cmd->add_option("--example", ev_example, "dataset override");
    eval_cmd->add_option("--samples", ev_samples, "equivariance sample count");
    eval_cmd->add_option("--tol", ev_tol, "equivariance tolerance");
    auto* eval_seed = eval_cmd->add_option("--seed", ev_seed, "RNG seed");
    eval_cmd->add_option("--out", ev_out, "output directory");

    // ---- check-invariants ----------------------------------------------------
    std::string ci_geometry = "r2-so2", ci_out;
    int ci_order = 1, ci_samples = 1000;
    double ci_tol = 1e-6;
    std::uint64_t ci_seed = 0;
    CLI::App* ci_cmd =
        app.add_subcommand("check-invariants", "Verify a registered invariant set");
    ci_cmd->add_option("--geometry", ci_geometry, "r2-so2 | s2-so2")->required();
    ci_cmd->add_option("--order", ci_order, "1 or 2");
    ci_cmd->add_option("--samples", ci_samples, "random jets");
    ci_cmd->add_option("--tol", ci_tol, "tolerance");
    auto* ci_seed_opt = ci_cmd->add_option("--seed", ci_seed, "RNG seed");
    ci_cmd->add_option("--out", ci_out, "output directory");

    // ---- check-equivariance --------------------------------------------------
    std::string ce_geometry = "r2-so2", ce_kind = "plain", ce_checkpoint, ce_out;
    std::string ce_hidden = "32,32";
    int ce_models = 10, ce_pairs = 100;
    double ce_tol = 1e-5;
    std::uint64_t ce_seed = 0;
    CLI::App* ce_cmd = app.add_subcommand("check-equivariance",
                                          "Verify model equivariance by construction");
    ce_cmd->add_option("--geometry", ce_geometry, "r2-so2 | s2-so2");
    ce_cmd->add_option("--kind", ce_kind, "plain | augmented");
    ce_cmd->add_option("--checkpoint", ce_checkpoint, "check this checkpoint instead");
    ce_cmd->add_option("--models", ce_models, "random parameter vectors");
    ce_cmd->add_option("--pairs", ce_pairs, "random (g, p) pairs per model");
    ce_cmd->add_option("--tol", ce_tol, "tolerance");
    ce_cmd->add_option("--hidden", ce_hidden, "hidden widths of random models");
    auto* ce_seed_opt = ce_cmd->add_option("--seed", ce_seed, "RNG seed");
    ce_cmd->add_option("--out", ce_out, "output directory");

    // ---- density -------------------------------------------------------------
    std::string de_checkpoint, de_out;
    int de_grid = 40;
    std::uint64_t de_seed = 0;
    CLI::App* de_cmd =
        app.add_subcommand("density", "Emit a transformed-density CSV grid for a checkpoint");
    de_cmd->add_option("--checkpoint", de_checkpoint, "checkpoint.json path")->required();
    de_cmd->add_option("--grid", de_grid, "grid points per axis");
    auto* de_seed_opt = de_cmd->add_option("--seed", de_seed, "RNG seed");
    de_cmd->add_option("--out", de_out, "output directory")->required();

    // ---- gradcheck -----------------------------------------------------------
    std::string gc_geometry = "r2-so2", gc_kind = "plain", gc_hidden = "16,16", gc_out;
    int gc_batch = 4, gc_steps = 20;
    double gc_tol = 1e-4;
    std::uint64_t gc_seed = 0;
    CLI::App* gc_cmd =
        app.add_subcommand("gradcheck", "Tape gradient vs central finite differences");
    gc_cmd->add_option("--geometry", gc_geometry, "r2-so2 | s2-so2");
    gc_cmd->add_option("--kind", gc_kind, "plain | augmented");
    gc_cmd->add_option("--hidden", gc_hidden, "hidden widths");
    gc_cmd->add_option("--batch", gc_batch, "batch size");
    gc_cmd->add_option("--steps", gc_steps, "RK4 steps");
    gc_cmd->add_option("--tol", gc_tol, "max relative error");
    auto* gc_seed_opt = gc_cmd->add_option("--seed", gc_seed, "RNG seed");
    gc_cmd->add_option("--out", gc_out, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) {
            if (!tc.config_file.empty()) {
                const nlohmann::json file = load_config_file(tc.config_file);
                merge_option(*train_cmd, "--kind", file, "kind", tc.kind);
                merge_option(*train_cmd, "--epochs", file, "epochs", tc.epochs);
                merge_option(*train_cmd, "--lr", file, "learning_rate", tc.lr);
                merge_option(*train_cmd, "--steps", file, "n_steps", tc.steps);
                if (train_cmd->count("--hidden") == 0 && file.contains("hidden")) {
                    // accepts [32, 32] or "32,32"
                    const auto& h = file.at("hidden");
                    if (h.is_array()) {
                        std::string joined;
                        for (const auto& w : h) {
                            if (!joined.empty()) joined += ',';
                            joined += std::to_string(w.get<int>());
                        }
                        tc.hidden = joined;
                    } else {
                        tc.hidden = h.get<std::string>();
                    }
                }
                merge_option(*train_cmd, "--delta-kick", file, "delta_kick", tc.delta_kick);
                merge_option(*train_cmd, "--include-time", file, "include_time", tc.include_time);
                merge_option(*train_cmd, "--threads", file, "threads", tc.threads);
                if (train_cmd->count("--seed") == 0 && file.contains("seed")) {
                    tc.seed = file.at("seed").get<std::uint64_t>();
                    tc.seed_given = true;
                }
            }
            if (train_cmd->count("--seed") > 0) tc.seed_given = true;
            if (!tc.seed_given) tc.seed = env_seed_or(42);
            (void)train_seed;
            return cmd_train(tc);
        }
        if (eval_cmd->parsed()) {
            if (eval_seed->count() == 0) ev_seed = env_seed_or(42);
            return cmd_eval(ev_checkpoint, ev_example, ev_out, ev_seed, ev_samples, ev_tol);
        }
        if (ci_cmd->parsed()) {
            if (ci_seed_opt->count() == 0) ci_seed = env_seed_or(12345);
            return cmd_check_invariants(ci_geometry, ci_order, ci_samples, ci_tol, ci_seed,
                                        ci_out);
        }
        if (ce_cmd->parsed()) {
            if (ce_seed_opt->count() == 0) ce_seed = env_seed_or(42);
            return cmd_check_equivariance(ce_geometry, ce_kind, ce_checkpoint, ce_models,
                                          ce_pairs, ce_tol, ce_seed, ce_hidden, ce_out);
        }
        if (de_cmd->parsed()) {
            if (de_seed_opt->count() == 0) de_seed = env_seed_or(42);
            return cmd_density(de_checkpoint, de_out, de_grid, de_seed);
        }
        if (gc_cmd->parsed()) {
            if (gc_seed_opt->count() == 0) gc_seed = env_seed_or(42);
            return cmd_gradcheck(gc_geometry, gc_kind, gc_hidden, gc_batch, gc_steps, gc_tol,
                                 gc_seed, gc_out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedGeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace symflow::cli
