#include "symflow/grad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "symflow/errors.hpp"
#include "symflow/model_field.hpp"
#include "symflow/parallel.hpp"
#include "symflow/rk4.hpp"
#include "symflow/tape.hpp"

namespace symflow {

LossKind default_loss(GeometryId geometry) {
    return geometry == GeometryId::Sphere2 ? LossKind::SphereChart : LossKind::SquaredEuclidean;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TapedField {
    const NodeModel* m;
    Tape* tape;
    void operator()(double t, const TVar* y, TVar* dy) const {
        TapeCtx ctx{tape};
        eval_model_field(*m, ctx, t, y, dy);
    }
};

/// Training-time chart guard: clamps back to the guard boundary on the tape
/// (gradient flows through the projection where it is defined) and counts the
/// event instead of aborting the epoch.
void guard_taped_state(const NodeModel& m, Tape& tape, TVar* s, int& clamps) {
    if (m.geometry == GeometryId::R2Punctured) {
        const double x = tape.value(s[0]), y = tape.value(s[1]);
        if (std::hypot(x, y) < Geometry::kRMin) {
            TVar r = sqrt(s[0] * s[0] + s[1] * s[1]);
            TVar scale = tape.constant(Geometry::kRMin) / r;
            s[0] = s[0] * scale;
            s[1] = s[1] * scale;
            ++clamps;
        }
    } else {
        const double theta_lo = Geometry::kThetaMin;
        const double theta_hi = std::numbers::pi - Geometry::kThetaMin;
        const double th = tape.value(s[0]);
        // the Clamp node counts the event on the tape itself
        if (th < theta_lo || th > theta_hi) s[0] = tape.clamp(s[0], theta_lo, theta_hi);
        const double ph = tape.value(s[1]);
        if (ph < 0.0 || ph >= kTwoPi) s[1] = tape.wrap_2pi(s[1]);
    }
}

struct SampleResult {
    double loss = 0.0;
    int clamps = 0;
};

SampleResult run_sample(Tape& tape, const NodeModel& m, const Vec2& input, const Vec2& target,
                        LossKind kind, double weight, std::span<double> grad_slot) {
    tape.reset();
    const int dim = m.state_dim();

    TVar s[kMaxState];
    if (m.kind == ModelKind::Plain) {
        s[0] = tape.constant(input[0]);
        s[1] = tape.constant(input[1]);
    } else {
        const auto lifted = lift_state(m, input);
        for (int i = 0; i < 4; ++i) s[i] = tape.constant(lifted[static_cast<std::size_t>(i)]);
    }

    SampleResult res;
    const TapedField field{&m, &tape};
    const double dt = 1.0 / m.n_steps;
    TVar next[kMaxState];
    for (int k = 0; k < m.n_steps; ++k) {
        rk4_step_generic(field, k * dt, s, dim, dt, next);
        for (int i = 0; i < dim; ++i) s[i] = next[i];
        guard_taped_state(m, tape, s, res.clamps);
    }

    TVar loss;
    if (kind == LossKind::SphereChart) {
        TVar dtheta = s[0] - target[0];
        TVar dphi = tape.principal_angle(s[1] - target[1]);
        loss = dtheta * dtheta + dphi * dphi;
    } else {
        TVar dx = s[0] - target[0];
        TVar dy = s[1] - target[1];
        loss = dx * dx + dy * dy;
    }

    tape.backward(loss, weight);
    const auto pg = tape.param_grad();
    std::copy(pg.begin(), pg.end(), grad_slot.begin());
    tape.zero_param_grad();
    res.clamps += tape.clamp_events();
    res.loss = tape.value(loss);
    return res;
}

}  // namespace

FlowGradResult grad_through_flow(const NodeModel& model, const Batch& batch, LossKind kind,
                                 int n_threads) {
    const std::size_t n = batch.inputs.size();
    if (n == 0 || batch.targets.size() != n)
        throw std::invalid_argument("grad_through_flow: batch must be nonempty with equal sizes");

    const std::vector<double> packed = model.packed_params();
    const std::size_t n_params = packed.size();
    const double weight = 1.0 / static_cast<double>(n);

    std::vector<double> grad_slots(n * n_params, 0.0);
    std::vector<SampleResult> sample_results(n);

    n_threads = std::max(1, n_threads);
    std::vector<Tape> tapes;
    tapes.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) tapes.emplace_back(std::span<const double>(packed));

    parallel_for(n, n_threads, [&](int thread, std::size_t i) {
        sample_results[i] = run_sample(
            tapes[static_cast<std::size_t>(thread)], model, batch.inputs[i], batch.targets[i],
            kind, weight, std::span<double>(grad_slots.data() + i * n_params, n_params));
    });

    FlowGradResult out;
    out.grad.assign(n_params, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(sample_results[i].loss))
            throw NumericError("non-finite loss at sample " + std::to_string(i));
        out.loss += sample_results[i].loss;
        out.clamp_events += sample_results[i].clamps;
        const double* g = grad_slots.data() + i * n_params;
        for (std::size_t p = 0; p < n_params; ++p) out.grad[p] += g[p];
    }
    out.loss *= weight;
    for (double gv : out.grad)
        if (!std::isfinite(gv)) throw NumericError("non-finite gradient component");
    return out;
}

GradCheckResult gradcheck(const NodeModel& model, const Batch& batch, LossKind kind, double fd_eps,
                          double tol) {
    const FlowGradResult res = grad_through_flow(model, batch, kind);

    NodeModel probe = model;
    std::vector<double> params = model.packed_params();
    GradCheckResult check;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + fd_eps;
        probe.set_packed_params(params);
        const double hi = grad_through_flow(probe, batch, kind).loss;
        params[i] = saved - fd_eps;
        probe.set_packed_params(params);
        const double lo = grad_through_flow(probe, batch, kind).loss;
        params[i] = saved;

        const double fd = (hi - lo) / (2.0 * fd_eps);
        const double g = res.grad[i];
        const double denom = std::max({std::abs(g), std::abs(fd), 1e-5});
        const double rel = std::abs(g - fd) / denom;
        if (rel > check.max_rel_error) {
            check.max_rel_error = rel;
            check.worst_index = i;
            check.tape_value = g;
            check.fd_value = fd;
        }
    }
    check.pass = check.max_rel_error < tol;
    return check;
}

}  // namespace symflow
