#include "symflow/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "symflow/errors.hpp"
#include "symflow/invariants.hpp"
#include "symflow/model_field.hpp"
#include "symflow/random.hpp"

namespace symflow {

std::string to_string(ModelKind kind) { return kind == ModelKind::Plain ? "plain" : "augmented"; }

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "plain") return ModelKind::Plain;
    if (s == "augmented") return ModelKind::Augmented;
    throw std::invalid_argument("unknown model kind '" + s + "'");
}

std::vector<double> NodeModel::packed_params() const {
    std::vector<double> packed;
    packed.reserve(static_cast<std::size_t>(total_params()));
    packed.insert(packed.end(), params_a.values.begin(), params_a.values.end());
    packed.insert(packed.end(), params_b.values.begin(), params_b.values.end());
    return packed;
}

void NodeModel::set_packed_params(std::span<const double> packed) {
    const std::size_t na = params_a.values.size();
    if (packed.size() != na + params_b.values.size())
        throw std::invalid_argument("packed parameter length mismatch");
    std::copy(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(na),
              params_a.values.begin());
    std::copy(packed.begin() + static_cast<std::ptrdiff_t>(na), packed.end(),
              params_b.values.begin());
}

bool NodeModel::is_identity() const {
    if (kind == ModelKind::Augmented && delta_kick != 0.0) return false;
    for (double v : params_a.values)
        if (v != 0.0) return false;
    for (double v : params_b.values)
        if (v != 0.0) return false;
    return true;
}

NodeModel make_model(GeometryId geometry, ModelKind kind, const std::vector<int>& hidden,
                     std::uint64_t seed, int n_steps, bool include_time, double delta_kick) {
    NodeModel m;
    m.geometry = geometry;
    m.kind = kind;
    m.n_steps = n_steps;
    m.include_time = include_time;
    m.delta_kick = delta_kick;

    const int order = kind == ModelKind::Plain ? 1 : 2;
    m.invariant_set_label = invariant_registry(geometry, order).label;

    const int n_inputs = (kind == ModelKind::Plain ? 1 : 3) + (include_time ? 1 : 0);
    m.spec_a = MlpSpec{n_inputs, 1, hidden};
    m.spec_b = MlpSpec{n_inputs, 1, hidden};
    m.params_a = init_params(m.spec_a, seed);
    m.params_b = init_params(m.spec_b, seed + 1);
    return m;
}

FieldSpec build_field(const NodeModel& m) {
    if (m.kind != ModelKind::Plain)
        throw std::invalid_argument("build_field requires a PLAIN model");
    FieldSpec f;
    f.dim_state = 2;
    f.params = m.packed_params();
    f.eval = [m](double t, std::span<const double> state, std::span<const double> params,
                 std::span<double> out) {
        NumericCtx ctx{params};
        eval_plain_field(m, ctx, t, state.data(), out.data());
    };
    return f;
}

FieldSpec build_augmented_field(const NodeModel& m) {
    if (m.kind != ModelKind::Augmented)
        throw std::invalid_argument("build_augmented_field requires an AUGMENTED model");
    FieldSpec f;
    f.dim_state = 4;
    f.params = m.packed_params();
    f.eval = [m](double t, std::span<const double> state, std::span<const double> params,
                 std::span<double> out) {
        NumericCtx ctx{params};
        eval_augmented_field(m, ctx, t, state.data(), out.data());
    };
    return f;
}

FieldSpec build_model_field(const NodeModel& m) {
    return m.kind == ModelKind::Plain ? build_field(m) : build_augmented_field(m);
}

StepGuard chart_guard(const NodeModel& m) {
    const Geometry g = make_geometry(m.geometry);
    if (m.geometry == GeometryId::R2Punctured) {
        return [](double, std::span<double> state) {
            return std::hypot(state[0], state[1]) >= Geometry::kRMin;
        };
    }
    return [g](double, std::span<double> state) {
        state[1] = wrap_angle(state[1]);
        return contains(g, {state[0], state[1]});
    };
}

std::vector<double> lift_state(const NodeModel& m, const Vec2& p) {
    std::vector<double> s(4, 0.0);
    s[0] = p[0];
    s[1] = p[1];
    if (m.delta_kick != 0.0) {
        if (m.geometry == GeometryId::R2Punctured) {
            const double r = std::hypot(p[0], p[1]);
            s[2] = m.delta_kick * p[0] / r;
            s[3] = m.delta_kick * p[1] / r;
        } else {
            s[2] = m.delta_kick;  // polar direction is invariant under phi-shifts
        }
    }
    return s;
}

Vec2 apply(const NodeModel& m, Vec2 p) {
    if (!contains(make_geometry(m.geometry), p))
        throw DomainError("apply: point outside chart");
    if (m.is_identity()) return p;

    const StepGuard guard = chart_guard(m);
    if (m.kind == ModelKind::Plain) {
        const FieldSpec f = build_field(m);
        const auto out = flow(f, std::span<const double>(p.data(), 2), 1.0, m.n_steps, guard);
        return {out[0], out[1]};
    }
    const FieldSpec f = build_augmented_field(m);
    const auto s0 = lift_state(m, p);
    const auto out = integrate(f, s0, 0.0, 1.0, m.n_steps,
                               [&guard](double t, std::span<double> state) {
                                   return guard(t, state.subspan(0, 2));
                               })
                         .final_state();
    return {out[0], out[1]};
}

namespace {

Vec2 chart_residual(GeometryId geometry, const Vec2& have, const Vec2& want) {
    if (geometry == GeometryId::Sphere2)
        return {have[0] - want[0], circular_diff(have[1], want[1])};
    return {have[0] - want[0], have[1] - want[1]};
}

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

/// Damped Gauss-Newton for the augmented inverse; apply failures (flow left
/// chart during a probe) are treated as rejected trial steps.
Vec2 gauss_newton_inverse(const NodeModel& m, const Vec2& target) {
    constexpr int kMaxIter = 100;
    constexpr double kTol = 1e-11;
    constexpr double kJacEps = 1e-6;

    Vec2 u = target;
    double lambda = 1e-3;
    double res_norm = std::numeric_limits<double>::infinity();

    auto residual = [&](const Vec2& q) {
        return chart_residual(m.geometry, apply(m, q), target);
    };

    Vec2 f{};
    bool have_f = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (!have_f) {
            f = residual(u);
            res_norm = norm2(f);
            have_f = true;
        }
        if (res_norm < kTol) return u;

        Mat2 jac{};
        for (int c = 0; c < 2; ++c) {
            Vec2 hi = u, lo = u;
            hi[c] += kJacEps;
            lo[c] -= kJacEps;
            const Vec2 fhi = residual(hi), flo = residual(lo);
            jac[0][c] = (fhi[0] - flo[0]) / (2.0 * kJacEps);
            jac[1][c] = (fhi[1] - flo[1]) / (2.0 * kJacEps);
        }

        // solve (J^T J + lambda I) s = -J^T f
        const double jtj00 = jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0] + lambda;
        const double jtj01 = jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1];
        const double jtj11 = jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1] + lambda;
        const double rhs0 = -(jac[0][0] * f[0] + jac[1][0] * f[1]);
        const double rhs1 = -(jac[0][1] * f[0] + jac[1][1] * f[1]);
        const double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (det == 0.0 || !std::isfinite(det))
            throw ConvergenceError("apply_inverse: singular normal equations", res_norm);
        const Vec2 step = {(rhs0 * jtj11 - rhs1 * jtj01) / det,
                           (rhs1 * jtj00 - rhs0 * jtj01) / det};

        Vec2 trial = {u[0] + step[0], u[1] + step[1]};
        if (m.geometry == GeometryId::Sphere2) trial[1] = wrap_angle(trial[1]);
        bool improved = false;
        if (contains(make_geometry(m.geometry), trial)) {
            try {
                const Vec2 ft = residual(trial);
                const double nt = norm2(ft);
                if (nt < res_norm) {
                    u = trial;
                    f = ft;
                    res_norm = nt;
                    improved = true;
                }
            } catch (const FlowLeftChartError&) {
            } catch (const DomainError&) {
            }
        }
        lambda = improved ? std::max(lambda / 3.0, 1e-12) : lambda * 10.0;
        if (lambda > 1e12)
            throw ConvergenceError("apply_inverse: damping diverged, residual " +
                                       std::to_string(res_norm),
                                   res_norm);
    }
    throw ConvergenceError(
        "apply_inverse: no convergence after 100 iterations, residual " + std::to_string(res_norm),
        res_norm);
}

}  // namespace

Vec2 apply_inverse(const NodeModel& m, Vec2 p) {
    if (!contains(make_geometry(m.geometry), p))
        throw DomainError("apply_inverse: point outside chart");
    if (m.is_identity()) return p;

    if (m.kind == ModelKind::Plain) {
        const FieldSpec f = build_field(m);
        const auto out = integrate(f, std::span<const double>(p.data(), 2), 1.0, 0.0, m.n_steps,
                                   chart_guard(m))
                             .final_state();
        return {out[0], out[1]};
    }
    return gauss_newton_inverse(m, p);
}

SampleRegion default_region(GeometryId geometry) {
    if (geometry == GeometryId::R2Punctured) return {0.5, 2.5};
    return {0.25, 1.1};
}

EquivarianceReport check_map_equivariance(const Geometry& g,
                                          const std::function<Vec2(const Vec2&)>& h,
                                          int n_samples, double tol, std::uint64_t seed,
                                          SampleRegion region) {
    Rng rng(seed);
    EquivarianceReport rep;
    rep.n_samples = n_samples;
    for (int i = 0; i < n_samples; ++i) {
        Vec2 p;
        if (g.id == GeometryId::R2Punctured) {
            const double r = rng.uniform(region.lo, region.hi);
            const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
            p = {r * std::cos(ang), r * std::sin(ang)};
        } else {
            p = {rng.uniform(region.lo, region.hi), rng.uniform(0.0, 2.0 * std::numbers::pi)};
        }
        const GroupElement e{rng.uniform(-std::numbers::pi, std::numbers::pi)};
        const Vec2 lhs = act(g, e, h(p));
        const Vec2 rhs = h(act(g, e, p));
        const Vec2 diff = chart_residual(g.id, lhs, rhs);
        const double v = norm2(diff);
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_g = e;
            rep.worst_p = p;
        }
    }
    rep.pass = rep.max_violation < tol;
    return rep;
}

EquivarianceReport check_model_equivariance(const NodeModel& m, int n_samples, double tol,
                                            std::uint64_t seed) {
    return check_model_equivariance(m, n_samples, tol, seed, default_region(m.geometry));
}

EquivarianceReport check_model_equivariance(const NodeModel& m, int n_samples, double tol,
                                            std::uint64_t seed, SampleRegion region) {
    const Geometry g = make_geometry(m.geometry);
    return check_map_equivariance(
        g, [&m](const Vec2& p) { return apply(m, p); }, n_samples, tol, seed, region);
}

Diffeo as_diffeo(const NodeModel& m) {
    Diffeo d;
    d.geometry = m.geometry;
    d.exact_identity = m.is_identity();
    NodeModel copy = m;
    d.fwd = [copy](const Vec2& p) { return apply(copy, p); };
    d.inv = [copy](const Vec2& p) { return apply_inverse(copy, p); };
    return d;
}

}  // namespace symflow
