#include "symflow/fields.hpp"

#include <cmath>
#include <numbers>

#include "symflow/random.hpp"

namespace symflow {

Mat2 map_jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& p, double eps) {
    Mat2 j{};
    for (int col = 0; col < 2; ++col) {
        Vec2 hi = p, lo = p;
        hi[col] += eps;
        lo[col] -= eps;
        const Vec2 mhi = map(hi), mlo = map(lo);
        for (int row = 0; row < 2; ++row) j[row][col] = (mhi[row] - mlo[row]) / (2.0 * eps);
    }
    return j;
}

ScalarField transform_scalar(const Diffeo& h, const ScalarField& f) {
    if (h.exact_identity) return {f.eval, f.label + "|id"};
    auto inv = h.inv;
    auto eval = f.eval;
    return {[inv, eval](const Vec2& p) { return eval(inv(p)); }, f.label + "|h"};
}

Density transform_density(const Diffeo& h, const Density& rho) {
    if (h.exact_identity) return {rho.eval, rho.label + "|id"};
    auto inv = h.inv;
    auto eval = rho.eval;
    return {[inv, eval](const Vec2& p) {
                const Vec2 q = inv(p);
                const Mat2 j = map_jacobian(inv, p);
                return eval(q) * std::abs(det2(j));
            },
            rho.label + "|h"};
}

VectorFieldOnM transform_vector(const Diffeo& h, const VectorFieldOnM& v) {
    if (h.exact_identity) return {v.eval, v.label + "|id"};
    auto fwd = h.fwd;
    auto inv = h.inv;
    auto eval = v.eval;
    return {[fwd, inv, eval](const Vec2& p) -> Vec2 {
                const Vec2 q = inv(p);
                const Mat2 j = map_jacobian(fwd, q);
                const Vec2 vq = eval(q);
                return {j[0][0] * vq[0] + j[0][1] * vq[1], j[1][0] * vq[0] + j[1][1] * vq[1]};
            },
            v.label + "|h"};
}

ScalarField transform_scalar(const NodeModel& model, const ScalarField& f) {
    return transform_scalar(as_diffeo(model), f);
}
Density transform_density(const NodeModel& model, const Density& rho) {
    return transform_density(as_diffeo(model), rho);
}
VectorFieldOnM transform_vector(const NodeModel& model, const VectorFieldOnM& v) {
    return transform_vector(as_diffeo(model), v);
}

namespace {

Vec2 sample_point(const Geometry& g, Rng& rng, SampleRegion region) {
    if (g.id == GeometryId::R2Punctured) {
        const double r = rng.uniform(region.lo, region.hi);
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return {r * std::cos(ang), r * std::sin(ang)};
    }
    return {rng.uniform(region.lo, region.hi), rng.uniform(0.0, 2.0 * std::numbers::pi)};
}

/// |rho(p) - rho(L_g^{-1} p) |det J_{L_g^{-1}}(p)||, the Def-style residual.
double density_residual(const Geometry& g, const std::function<double(const Vec2&)>& rho,
                        const GroupElement& e, const Vec2& p, int* degenerate) {
    const GroupElement inv_e{-e.epsilon};
    const Vec2 q = act(g, inv_e, p);
    const double det = det2(action_jacobian(g, inv_e, p));
    if (std::abs(det) < 1e-12 && degenerate) ++(*degenerate);
    return std::abs(rho(p) - rho(q) * std::abs(det));
}

}  // namespace

FieldCheckReport check_density_equivariance(const Geometry& g, const Density& rho,
                                            const Diffeo& h, int n_samples, double tol,
                                            std::uint64_t seed, SampleRegion region) {
    FieldCheckReport rep;
    rep.n_samples = n_samples;
    Rng rng(seed);
    const Density rho_h = transform_density(h, rho);

    for (int i = 0; i < n_samples; ++i) {
        const Vec2 p = sample_point(g, rng, region);
        const GroupElement e{rng.uniform(-std::numbers::pi, std::numbers::pi)};
        rep.input_violation = std::max(
            rep.input_violation, density_residual(g, rho.eval, e, p, &rep.degenerate_jacobians));
        rep.max_violation = std::max(
            rep.max_violation, density_residual(g, rho_h.eval, e, p, &rep.degenerate_jacobians));
    }
    rep.input_ok = rep.input_violation < tol;
    rep.pass = rep.input_ok && rep.max_violation < tol;
    return rep;
}

FieldCheckReport check_density_equivariance(const Geometry& g, const Density& rho,
                                            const NodeModel& model, int n_samples, double tol,
                                            std::uint64_t seed) {
    return check_density_equivariance(g, rho, as_diffeo(model), n_samples, tol, seed,
                                      default_region(g.id));
}

FieldCheckReport check_vector_equivariance(const Geometry& g, const VectorFieldOnM& v,
                                           const Diffeo& h, int n_samples, double tol,
                                           std::uint64_t seed, SampleRegion region) {
    FieldCheckReport rep;
    rep.n_samples = n_samples;
    Rng rng(seed);
    const VectorFieldOnM vh = transform_vector(h, v);

    auto residual = [&](const std::function<Vec2(const Vec2&)>& field, const GroupElement& e,
                        const Vec2& p) {
        const TangentVector pushed = pushforward(g, e, {p, field(p)});
        const Vec2 there = field(act(g, e, p));
        return std::hypot(there[0] - pushed.components[0], there[1] - pushed.components[1]);
    };

    for (int i = 0; i < n_samples; ++i) {
        const Vec2 p = sample_point(g, rng, region);
        const GroupElement e{rng.uniform(-std::numbers::pi, std::numbers::pi)};
        rep.input_violation = std::max(rep.input_violation, residual(v.eval, e, p));
        rep.max_violation = std::max(rep.max_violation, residual(vh.eval, e, p));
    }
    rep.input_ok = rep.input_violation < tol;
    rep.pass = rep.input_ok && rep.max_violation < tol;
    return rep;
}

FieldCheckReport check_vector_equivariance(const Geometry& g, const VectorFieldOnM& v,
                                           const NodeModel& model, int n_samples, double tol,
                                           std::uint64_t seed) {
    return check_vector_equivariance(g, v, as_diffeo(model), n_samples, tol, seed,
                                     default_region(g.id));
}

}  // namespace symflow
