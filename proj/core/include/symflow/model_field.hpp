#pragma once

#include <cmath>
#include <span>

#include "symflow/manifold.hpp"
#include "symflow/model.hpp"
#include "symflow/net.hpp"
#include "symflow/tape.hpp"

namespace symflow {

/// Evaluation contexts for the invariant-parameterized vector fields. The
/// field formulas below are written once, generic over the scalar type, so
/// the plain numeric path and the gradient tape compute the same function.
struct NumericCtx {
    using Scalar = double;
    std::span<const double> params;  // packed [A | B]

    static double lit(double v) { return v; }
    void mlp(const MlpSpec& spec, int param_off, const double* in, double* out) const {
        mlp_forward(spec, params.subspan(static_cast<std::size_t>(param_off)),
                    std::span<const double>(in, static_cast<std::size_t>(spec.in_dim)),
                    std::span<double>(out, static_cast<std::size_t>(spec.out_dim)));
    }
};

struct TapeCtx {
    using Scalar = TVar;
    Tape* tape = nullptr;

    TVar lit(double v) const { return tape->constant(v); }
    void mlp(const MlpSpec& spec, int param_off, const TVar* in, TVar* out) const {
        tape->mlp(spec, param_off, in, out);
    }
};

namespace detail {

template <class Ctx, class S = typename Ctx::Scalar>
void eval_ab(const NodeModel& m, Ctx& ctx, double t, const S* inv, int n_inv, S& a, S& b) {
    S in[4];
    int n = 0;
    if (m.include_time) in[n++] = ctx.lit(t);
    for (int i = 0; i < n_inv; ++i) in[n++] = inv[i];
    ctx.mlp(m.spec_a, m.a_param_offset(), in, &a);
    ctx.mlp(m.spec_b, m.b_param_offset(), in, &b);
}

}  // namespace detail

template <class Ctx, class S = typename Ctx::Scalar>
void eval_plain_field(const NodeModel& m, Ctx& ctx, double t, const S* state, S* deriv) {
    using std::sqrt;
    S a, b;
    if (m.geometry == GeometryId::R2Punctured) {
        const S x = state[0], y = state[1];
        S r = sqrt(x * x + y * y);
        detail::eval_ab(m, ctx, t, &r, 1, a, b);
        deriv[0] = a * x - b * y;
        deriv[1] = b * x + a * y;
    } else {
        const S theta = state[0];
        detail::eval_ab(m, ctx, t, &theta, 1, a, b);
        deriv[0] = a;
        deriv[1] = b;
    }
}

template <class Ctx, class S = typename Ctx::Scalar>
void eval_augmented_field(const NodeModel& m, Ctx& ctx, double t, const S* state, S* deriv) {
    using std::sqrt;
    S a, b;
    if (m.geometry == GeometryId::R2Punctured) {
        const S x = state[0], y = state[1], xd = state[2], yd = state[3];
        S inv[3];
        inv[0] = sqrt(x * x + y * y);  // r
        inv[1] = x * xd + y * yd;      // r rdot
        inv[2] = x * yd - y * xd;      // r^2 thetadot
        detail::eval_ab(m, ctx, t, inv, 3, a, b);
        deriv[0] = xd;
        deriv[1] = yd;
        deriv[2] = a * xd - b * yd;
        deriv[3] = b * xd + a * yd;
    } else {
        const S theta = state[0], td = state[2], pd = state[3];
        S inv[3] = {theta, td, pd};
        detail::eval_ab(m, ctx, t, inv, 3, a, b);
        deriv[0] = td;
        deriv[1] = pd;
        deriv[2] = a;
        deriv[3] = b;
    }
}

template <class Ctx, class S = typename Ctx::Scalar>
void eval_model_field(const NodeModel& m, Ctx& ctx, double t, const S* state, S* deriv) {
    if (m.kind == ModelKind::Plain)
        eval_plain_field(m, ctx, t, state, deriv);
    else
        eval_augmented_field(m, ctx, t, state, deriv);
}

}  // namespace symflow
