#include "symflow/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "symflow/checkpoint.hpp"
#include "symflow/errors.hpp"
#include "symflow/parallel.hpp"

namespace symflow {

TrainConfig resolved(TrainConfig cfg) {
    if (!cfg.kind) cfg.kind = default_model_kind(cfg.example);
    if (cfg.epochs <= 0) cfg.epochs = default_epochs(cfg.example);
    if (cfg.learning_rate <= 0.0)
        cfg.learning_rate = *cfg.kind == ModelKind::Augmented ? 5e-3 : 1e-2;
    if (cfg.threads <= 0) cfg.threads = default_thread_count();
    return cfg;
}

AdamState make_adam_state(std::size_t n_params) {
    AdamState s;
    s.m.assign(n_params, 0.0);
    s.v.assign(n_params, 0.0);
    return s;
}

void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grads,
               double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

double clip_global_norm(std::span<double> g, double max_norm) {
    double sq = 0.0;
    for (double v : g) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (double& v : g) v *= scale;
    }
    return norm;
}

double dataset_loss(const NodeModel& model, const Dataset& ds, int* flow_failures) {
    int failures = 0;
    double acc = 0.0;
    std::size_t used = 0;
    const bool sphere = ds.geometry == GeometryId::Sphere2;
    for (std::size_t i = 0; i < ds.inputs.size(); ++i) {
        try {
            const Vec2 out = apply(model, ds.inputs[i]);
            const double d0 = out[0] - ds.targets[i][0];
            const double d1 = sphere ? circular_diff(out[1], ds.targets[i][1])
                                     : out[1] - ds.targets[i][1];
            acc += d0 * d0 + d1 * d1;
            ++used;
        } catch (const FlowLeftChartError&) {
            ++failures;
        }
    }
    if (flow_failures) *flow_failures = failures;
    if (used == 0) throw NumericError("dataset_loss: every sample left the chart");
    return acc / static_cast<double>(used);
}

namespace {

void write_artifacts(const TrainConfig& cfg, const NodeModel& model, const History& history,
                     const Dataset& ds, bool final) {
    const std::filesystem::path dir(cfg.output_dir);
    const Json cfg_json = config_to_json(cfg);
    const Json summary = history_summary_json(history);
    save_checkpoint(model, (dir / "checkpoint.json").string(), &cfg_json, &summary);
    if (final) {
        write_metrics_csv((dir / "metrics.csv").string(), history);
        write_curves_csv((dir / "curves.csv").string(), curve_samples(model, ds));
    }
}

}  // namespace

FitResult fit(const TrainConfig& config) {
    const TrainConfig cfg = resolved(config);
    const Dataset ds = make_dataset(cfg.example, cfg.seed);
    const GeometryId geometry = ds.geometry;
    const LossKind loss_kind = default_loss(geometry);

    NodeModel model = make_model(geometry, *cfg.kind, cfg.hidden, cfg.seed, cfg.n_steps,
                                 cfg.include_time, cfg.delta_kick);

    Batch batch{ds.inputs, ds.targets};
    std::vector<double> params = model.packed_params();
    AdamState adam = make_adam_state(params.size());

    History history;
    history.best_loss = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        FlowGradResult res;
        try {
            res = grad_through_flow(model, batch, loss_kind, cfg.threads);
        } catch (const NumericError& e) {
            throw NumericError("training aborted at epoch " + std::to_string(epoch) + ": " +
                               e.what());
        }

        clip_global_norm(res.grad, 10.0);
        adam_step(adam, params, res.grad, cfg.learning_rate);
        model.set_packed_params(params);

        HistoryRow row;
        row.epoch = epoch;
        row.loss = res.loss;
        if (epoch % 50 == 0 || epoch == cfg.epochs) {
            const auto eq = check_model_equivariance(
                model, 20, 1e-5, cfg.seed ^ (0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(epoch)));
            row.equiv_violation = eq.max_violation;
            history.final_equiv_violation = eq.max_violation;
        }
        history.rows.push_back(row);
        history.best_loss = std::min(history.best_loss, res.loss);
        history.clamp_events += res.clamp_events;

        if (!cfg.output_dir.empty() && (epoch % 100 == 0 || epoch == cfg.epochs)) {
            history.final_loss = res.loss;  // refreshed below after the loop
            write_artifacts(cfg, model, history, ds, /*final=*/false);
        }
    }

    // loss of the trained parameters (one evaluation, no update)
    const FlowGradResult final_res = grad_through_flow(model, batch, loss_kind, cfg.threads);
    history.final_loss = final_res.loss;
    history.best_loss = std::min(history.best_loss, final_res.loss);

    if (!cfg.output_dir.empty()) write_artifacts(cfg, model, history, ds, /*final=*/true);
    return FitResult{std::move(model), std::move(history)};
}

CurveTable curve_samples(const NodeModel& model, const Dataset& ds, int n) {
    CurveTable table;
    const bool sphere = model.geometry == GeometryId::Sphere2;
    table.x_label = sphere ? "theta" : "r";

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const Vec2& p : ds.inputs) {
        const double x = sphere ? p[0] : std::hypot(p[0], p[1]);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }

    const int n_inputs = model.spec_a.in_dim;
    std::vector<double> in(static_cast<std::size_t>(n_inputs), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        std::fill(in.begin(), in.end(), 0.0);
        // input layout: [t,] x [, extra invariants fixed at 0]
        in[model.include_time ? 1 : 0] = x;
        table.xs.push_back(x);
        table.a.push_back(mlp_forward_scalar(model.spec_a, model.params_a.values, in));
        table.b.push_back(mlp_forward_scalar(model.spec_b, model.params_b.values, in));
    }
    return table;
}

void write_metrics_csv(const std::string& path, const History& history) {
    std::string csv = "epoch,loss,equiv_violation\n";
    for (const HistoryRow& row : history.rows) {
        csv += std::to_string(row.epoch);
        csv += ',';
        csv += format_double(row.loss);
        csv += ',';
        if (row.equiv_violation) csv += format_double(*row.equiv_violation);
        csv += '\n';
    }
    write_text_file(path, csv);
}

void write_curves_csv(const std::string& path, const CurveTable& table) {
    std::string csv = table.x_label + ",A,B\n";
    for (std::size_t i = 0; i < table.xs.size(); ++i) {
        csv += format_double(table.xs[i]);
        csv += ',';
        csv += format_double(table.a[i]);
        csv += ',';
        csv += format_double(table.b[i]);
        csv += '\n';
    }
    write_text_file(path, csv);
}

Json config_to_json(const TrainConfig& cfg) {
    const TrainConfig r = resolved(cfg);
    Json j = Json::object();
    j["example"] = to_string(r.example);
    j["kind"] = to_string(*r.kind);
    j["epochs"] = r.epochs;
    j["learning_rate"] = r.learning_rate;
    j["seed"] = static_cast<std::int64_t>(r.seed);
    j["n_steps"] = r.n_steps;
    Json hidden = Json::array();
    for (int h : r.hidden) hidden.push_back(h);
    j["hidden"] = std::move(hidden);
    j["delta_kick"] = r.delta_kick;
    j["include_time"] = r.include_time;
    j["threads"] = r.threads;
    return j;
}

Json history_summary_json(const History& history) {
    Json j = Json::object();
    j["epochs_run"] = static_cast<std::int64_t>(history.rows.size());
    j["final_loss"] = history.final_loss;
    j["best_loss"] = history.best_loss;
    j["final_equiv_violation"] = history.final_equiv_violation;
    j["clamp_events"] = history.clamp_events;
    return j;
}

}  // namespace symflow
