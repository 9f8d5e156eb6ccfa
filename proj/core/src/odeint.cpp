#include "symflow/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symflow/errors.hpp"

namespace symflow {

namespace {

struct CheckedField {
    const FieldSpec& field;

    void operator()(double t, const double* y, double* dy) const {
        const int n = field.dim_state;
        field.eval(t, std::span<const double>(y, static_cast<std::size_t>(n)), field.params,
                   std::span<double>(dy, static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(dy[i]))
                throw NumericError("non-finite derivative at t = " + std::to_string(t), t);
    }
};

}  // namespace

std::vector<double> rk4_step(const FieldSpec& field, double t, std::span<const double> state,
                             double dt) {
    if (dt == 0.0) throw NumericError("rk4_step requires dt != 0", t);
    std::vector<double> out(state.size());
    rk4_step_generic(CheckedField{field}, t, state.data(), field.dim_state, dt, out.data());
    return out;
}

Trajectory integrate(const FieldSpec& field, std::span<const double> state0, double t0, double t1,
                     int n_steps, const StepGuard& guard) {
    if (n_steps < 1) throw NumericError("integrate requires n_steps >= 1", t0);
    const double dt = (t1 - t0) / n_steps;

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.times.push_back(t0);
    traj.states.emplace_back(state0.begin(), state0.end());

    std::vector<double> y(state0.begin(), state0.end());
    std::vector<double> next(y.size());
    for (int k = 0; k < n_steps; ++k) {
        const double t = t0 + k * dt;
        rk4_step_generic(CheckedField{field}, t, y.data(), field.dim_state, dt, next.data());
        const double t_next = (k + 1 == n_steps) ? t1 : t0 + (k + 1) * dt;
        if (guard && !guard(t_next, std::span<double>(next))) {
            throw FlowLeftChartError("flow left chart at t = " + std::to_string(t_next),
                                     std::move(traj.times), std::move(traj.states));
        }
        y = next;
        traj.times.push_back(t_next);
        traj.states.push_back(y);
    }
    traj.step_count = n_steps;
    return traj;
}

std::vector<double> flow(const FieldSpec& field, std::span<const double> state0, double t,
                         int n_steps, const StepGuard& guard) {
    if (t == 0.0) return {state0.begin(), state0.end()};
    return integrate(field, state0, 0.0, t, n_steps, guard).final_state();
}

// Fehlberg 4(5) tableau.
namespace rkf {
constexpr double a2 = 1.0 / 4, a3 = 3.0 / 8, a4 = 12.0 / 13, a5 = 1.0, a6 = 1.0 / 2;
constexpr double b21 = 1.0 / 4;
constexpr double b31 = 3.0 / 32, b32 = 9.0 / 32;
constexpr double b41 = 1932.0 / 2197, b42 = -7200.0 / 2197, b43 = 7296.0 / 2197;
constexpr double b51 = 439.0 / 216, b52 = -8.0, b53 = 3680.0 / 513, b54 = -845.0 / 4104;
constexpr double b61 = -8.0 / 27, b62 = 2.0, b63 = -3544.0 / 2565, b64 = 1859.0 / 4104,
                 b65 = -11.0 / 40;
constexpr double c1 = 16.0 / 135, c3 = 6656.0 / 12825, c4 = 28561.0 / 56430, c5 = -9.0 / 50,
                 c6 = 2.0 / 55;
constexpr double d1 = 25.0 / 216, d3 = 1408.0 / 2565, d4 = 2197.0 / 4104, d5 = -1.0 / 5;
}  // namespace rkf

Trajectory integrate_adaptive(const FieldSpec& field, std::span<const double> state0, double t0,
                              double t1, double rtol, double atol, const StepGuard& guard) {
    const int n = field.dim_state;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span_len = std::abs(t1 - t0);
    CheckedField f{field};

    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.emplace_back(state0.begin(), state0.end());
    if (span_len == 0.0) return traj;

    std::vector<double> y(state0.begin(), state0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n), y5(n), y4(n);

    double t = t0;
    double h = dir * span_len / 100.0;
    const double h_min = span_len * 1e-12;
    int max_attempts = 1000000;

    while (dir * (t1 - t) > 0.0 && max_attempts-- > 0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        f(t, y.data(), k1.data());
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * rkf::b21 * k1[i];
        f(t + rkf::a2 * h, tmp.data(), k2.data());
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (rkf::b31 * k1[i] + rkf::b32 * k2[i]);
        f(t + rkf::a3 * h, tmp.data(), k3.data());
        for (int i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (rkf::b41 * k1[i] + rkf::b42 * k2[i] + rkf::b43 * k3[i]);
        f(t + rkf::a4 * h, tmp.data(), k4.data());
        for (int i = 0; i < n; ++i)
            tmp[i] = y[i] +
                     h * (rkf::b51 * k1[i] + rkf::b52 * k2[i] + rkf::b53 * k3[i] + rkf::b54 * k4[i]);
        f(t + rkf::a5 * h, tmp.data(), k5.data());
        for (int i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (rkf::b61 * k1[i] + rkf::b62 * k2[i] + rkf::b63 * k3[i] +
                                 rkf::b64 * k4[i] + rkf::b65 * k5[i]);
        f(t + rkf::a6 * h, tmp.data(), k6.data());

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            y5[i] = y[i] + h * (rkf::c1 * k1[i] + rkf::c3 * k3[i] + rkf::c4 * k4[i] +
                                rkf::c5 * k5[i] + rkf::c6 * k6[i]);
            y4[i] = y[i] + h * (rkf::d1 * k1[i] + rkf::d3 * k3[i] + rkf::d4 * k4[i] +
                                rkf::d5 * k5[i]);
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
        }

        if (err <= 1.0) {
            t += h;
            y = y5;
            if (guard && !guard(t, std::span<double>(y))) {
                throw FlowLeftChartError("flow left chart at t = " + std::to_string(t),
                                         std::move(traj.times), std::move(traj.states));
            }
            traj.times.push_back(t);
            traj.states.push_back(y);
            ++traj.step_count;
        }
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h *= factor;
        if (std::abs(h) < h_min)
            throw NumericError("adaptive step size underflow at t = " + std::to_string(t), t);
    }
    if (max_attempts <= 0) throw NumericError("adaptive integration exceeded attempt budget", t);
    return traj;
}

}  // namespace symflow
