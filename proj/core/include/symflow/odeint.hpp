#pragma once

#include <functional>
#include <span>
#include <vector>

#include "symflow/rk4.hpp"

namespace symflow {

/// A vector field over chart coordinates. eval must be deterministic and
/// smooth in (state, params) inside the chart guards.
struct FieldSpec {
    int dim_state = 2;
    std::vector<double> params;
    std::function<void(double t, std::span<const double> state, std::span<const double> params,
                       std::span<double> out)>
        eval;
};

/// Applied after every accepted step. May normalize the state in place (e.g.
/// wrap an azimuthal angle); returns false to signal that the flow left the
/// chart, which makes the integrator throw FlowLeftChartError with the
/// partial trajectory.
using StepGuard = std::function<bool(double t, std::span<double> state)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    int step_count = 0;

    const std::vector<double>& final_state() const { return states.back(); }
};

/// One classical RK4 step. Throws NumericError if the field produces a
/// non-finite derivative.
std::vector<double> rk4_step(const FieldSpec& field, double t, std::span<const double> state,
                             double dt);

/// Fixed-step RK4 over [t0, t1] (t1 < t0 integrates in reverse). Records
/// every intermediate state, n_steps + 1 entries.
Trajectory integrate(const FieldSpec& field, std::span<const double> state0, double t0, double t1,
                     int n_steps, const StepGuard& guard = nullptr);

/// Final state only.
std::vector<double> flow(const FieldSpec& field, std::span<const double> state0, double t,
                         int n_steps = 20, const StepGuard& guard = nullptr);

/// Adaptive Runge-Kutta-Fehlberg 4(5) for evaluation-only flows. Not used on
/// any gradient path.
Trajectory integrate_adaptive(const FieldSpec& field, std::span<const double> state0, double t0,
                              double t1, double rtol = 1e-8, double atol = 1e-10,
                              const StepGuard& guard = nullptr);

}  // namespace symflow
