#pragma once

#include <cstddef>

namespace symflow {

/// Hard cap on state dimension for stack-allocated integrator stages.
/// Registered geometries need at most 4 (tangent-bundle state).
inline constexpr int kMaxState = 8;

/// One classical RK4 step, generic over the scalar type so the same stepping
/// formula serves both plain evaluation (S = double) and the gradient tape
/// (S = TVar). F is callable as f(t, const S* y, S* dy).
template <class S, class F>
void rk4_step_generic(F&& f, double t, const S* y, int n, double dt, S* out) {
    S k1[kMaxState], k2[kMaxState], k3[kMaxState], k4[kMaxState], tmp[kMaxState];
    const double half = 0.5 * dt;

    f(t, y, k1);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + half * k1[i];
    f(t + half, tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + half * k2[i];
    f(t + half, tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    f(t + dt, tmp, k4);
    for (int i = 0; i < n; ++i)
        out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace symflow
