#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symflow/dataset.hpp"
#include "symflow/grad.hpp"
#include "symflow/model.hpp"
#include "symflow/report.hpp"

namespace symflow {

struct TrainConfig {
    ExampleId example = ExampleId::Radial;
    std::optional<ModelKind> kind;  // default: augmented for inverse-radius, else plain
    int epochs = 0;                 // 0 -> per-example default (300 / 400 / 1000)
    double learning_rate = 0.0;     // 0 -> 1e-2 plain, 5e-3 augmented
    std::uint64_t seed = 42;
    int n_steps = 20;
    std::vector<int> hidden = {32, 32};
    double delta_kick = 1e-2;
    bool include_time = false;
    int threads = 0;  // 0 -> default_thread_count()
    std::string output_dir;  // empty: no artifacts written
};

/// Fills the deferred defaults above.
TrainConfig resolved(TrainConfig cfg);

struct HistoryRow {
    int epoch = 0;  // 1-based
    double loss = 0.0;  // mean loss at the parameters entering this epoch
    std::optional<double> equiv_violation;  // measured every 50 epochs and at the end
};

struct History {
    std::vector<HistoryRow> rows;
    double final_loss = 0.0;  // loss of the trained parameters
    double best_loss = 0.0;
    double final_equiv_violation = 0.0;
    long clamp_events = 0;
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
};

AdamState make_adam_state(std::size_t n_params);

/// Standard bias-corrected Adam update. Throws NumericError on non-finite
/// gradients.
void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grads,
               double lr);

/// Scales g down to max_norm when its Euclidean norm exceeds it; returns the
/// pre-clip norm.
double clip_global_norm(std::span<double> g, double max_norm);

/// Mean squared chart distance of apply(model, input) to target (circular in
/// phi on the sphere). Samples whose flow leaves the chart are skipped and
/// counted in *flow_failures.
double dataset_loss(const NodeModel& model, const Dataset& ds, int* flow_failures = nullptr);

struct FitResult {
    NodeModel model;
    History history;
};

/// Full-batch Adam with gradient clipping at global norm 10. Writes
/// checkpoint.json every 100 epochs and at the end, metrics.csv and
/// curves.csv at the end (when output_dir is set). Aborts with NumericError
/// naming the epoch if the loss turns non-finite.
FitResult fit(const TrainConfig& config);

// ---- artifact helpers (shared with the CLI) --------------------------------

struct CurveTable {
    std::string x_label;  // "r" or "theta"
    std::vector<double> xs, a, b;
};

/// A and B sampled at n uniform points over the training range of r (or
/// theta). Augmented models are sampled on the (x, 0, 0) invariant slice.
CurveTable curve_samples(const NodeModel& model, const Dataset& ds, int n = 200);

void write_metrics_csv(const std::string& path, const History& history);
void write_curves_csv(const std::string& path, const CurveTable& table);

Json config_to_json(const TrainConfig& cfg);
Json history_summary_json(const History& history);

}  // namespace symflow
