#include "symflow/jet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symflow/errors.hpp"

namespace symflow {

namespace {

Vec2 generator_components(const Geometry& g, const Vec2& u) {
    return generator_value(g, u).components;
}

/// Central-difference Jacobian of the generator at u, step kJetFdStep.
Mat2 generator_jacobian_fd(const Geometry& g, const Vec2& u) {
    Mat2 j{};
    for (int col = 0; col < 2; ++col) {
        Vec2 hi = u, lo = u;
        hi[col] += kJetFdStep;
        lo[col] -= kJetFdStep;
        const Vec2 ghi = generator_components(g, hi);
        const Vec2 glo = generator_components(g, lo);
        for (int row = 0; row < 2; ++row) j[row][col] = (ghi[row] - glo[row]) / (2.0 * kJetFdStep);
    }
    return j;
}

/// Second directional difference of the generator along d, i.e. the Hessian
/// contraction (d^2 eta / d u^2)[d, d], with the step scaled so the probe
/// displacement has magnitude kJetFdStep2.
Vec2 generator_second_directional_fd(const Geometry& g, const Vec2& u, const Vec2& d) {
    const double norm = std::hypot(d[0], d[1]);
    if (norm < 1e-14) return {0.0, 0.0};
    const double s = kJetFdStep2 / norm;
    const Vec2 hi = {u[0] + s * d[0], u[1] + s * d[1]};
    const Vec2 lo = {u[0] - s * d[0], u[1] - s * d[1]};
    const Vec2 ghi = generator_components(g, hi);
    const Vec2 gmid = generator_components(g, u);
    const Vec2 glo = generator_components(g, lo);
    Vec2 out{};
    for (int i = 0; i < 2; ++i) out[i] = (ghi[i] - 2.0 * gmid[i] + glo[i]) / (s * s);
    return out;
}

}  // namespace

JetPoint prolonged_action(const Geometry& g, const GroupElement& e, const JetPoint& z) {
    const Mat2 j = action_jacobian(g, e, z.u);
    auto apply_lin = [&](const Vec2& v) -> Vec2 {
        return {j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]};
    };
    JetPoint out;
    out.t = z.t;
    out.u = act(g, e, z.u);
    out.du = apply_lin(z.du);
    if (z.ddu) out.ddu = apply_lin(*z.ddu);
    return out;
}

std::vector<double> prolong_generator(const Geometry& g, const JetPoint& z, int order) {
    if (order < 1 || order > 2) throw DomainError("prolongation order must be 1 or 2");
    if (z.order() < order) throw DomainError("jet order below requested prolongation order");

    const Vec2 eta = generator_components(g, z.u);
    const Mat2 jac = generator_jacobian_fd(g, z.u);

    std::vector<double> out;
    out.reserve(2 + 2 * static_cast<std::size_t>(order));
    out.push_back(eta[0]);
    out.push_back(eta[1]);

    const Vec2 eta1 = {jac[0][0] * z.du[0] + jac[0][1] * z.du[1],
                       jac[1][0] * z.du[0] + jac[1][1] * z.du[1]};
    out.push_back(eta1[0]);
    out.push_back(eta1[1]);

    if (order == 2) {
        const Vec2 hess = generator_second_directional_fd(g, z.u, z.du);
        const Vec2& ddu = *z.ddu;
        out.push_back(hess[0] + jac[0][0] * ddu[0] + jac[0][1] * ddu[1]);
        out.push_back(hess[1] + jac[1][0] * ddu[0] + jac[1][1] * ddu[1]);
    }
    return out;
}

double apply_prolonged(const Geometry& g, const InvariantFn& inv, const JetPoint& z) {
    if (inv.order > z.order()) throw DomainError("invariant order exceeds jet order");
    const std::vector<double> coeff = prolong_generator(g, z, inv.order);

    // gradient of the invariant over (u, du[, ddu]) by central differences
    const int n_coords = 2 + 2 * inv.order;
    double acc = 0.0;
    for (int c = 0; c < n_coords; ++c) {
        JetPoint hi = z, lo = z;
        double* phi = c < 2 ? &hi.u[c] : (c < 4 ? &hi.du[c - 2] : &(*hi.ddu)[c - 4]);
        double* plo = c < 2 ? &lo.u[c] : (c < 4 ? &lo.du[c - 2] : &(*lo.ddu)[c - 4]);
        *phi += kJetFdStep;
        *plo -= kJetFdStep;
        const double grad = (inv.eval(hi) - inv.eval(lo)) / (2.0 * kJetFdStep);
        acc += grad * coeff[static_cast<std::size_t>(c)];
    }
    return acc;
}

JetPoint sample_jet(const Geometry& g, int order, Rng& rng) {
    JetPoint z;
    z.t = rng.uniform(0.0, 1.0);
    if (g.id == GeometryId::R2Punctured) {
        const double r = rng.uniform(0.2, 3.0);
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        z.u = {r * std::cos(a), r * std::sin(a)};
    } else {
        z.u = {rng.uniform(0.2, std::numbers::pi - 0.2), rng.uniform(0.0, 2.0 * std::numbers::pi)};
    }
    z.du = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    if (order == 2) z.ddu = Vec2{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    return z;
}

InvarianceReport check_invariance(const Geometry& g, const std::vector<InvariantFn>& members,
                                  int order, int n_samples, double tol, std::uint64_t seed) {
    InvarianceReport rep;
    rep.n_samples = n_samples;
    Rng rng(seed);
    bool failed_numerically = false;

    for (int s = 0; s < n_samples; ++s) {
        const JetPoint z = sample_jet(g, order, rng);
        for (const InvariantFn& inv : members) {
            try {
                const double xi = std::abs(apply_prolonged(g, inv, z));
                if (xi > rep.max_infinitesimal) {
                    rep.max_infinitesimal = xi;
                    if (xi > tol) rep.worst_label = inv.label;
                }
            } catch (const std::exception&) {
                failed_numerically = true;
                rep.worst_label = inv.label;
            }
        }
        for (int k = 0; k < 10; ++k) {
            const GroupElement e{rng.uniform(-std::numbers::pi, std::numbers::pi)};
            const JetPoint zg = prolonged_action(g, e, z);
            for (const InvariantFn& inv : members) {
                try {
                    const double d = std::abs(inv.eval(zg) - inv.eval(z));
                    if (d > rep.max_finite) {
                        rep.max_finite = d;
                        if (d > tol) rep.worst_label = inv.label;
                    }
                } catch (const std::exception&) {
                    failed_numerically = true;
                    rep.worst_label = inv.label;
                }
            }
        }
    }
    rep.pass = !failed_numerically && rep.max_infinitesimal < tol && rep.max_finite < tol;
    return rep;
}

}  // namespace symflow
