#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symflow/manifold.hpp"
#include "symflow/random.hpp"

namespace symflow {

/// A point of the jet space J^(k)E, E = T x M: time, chart point and its
/// derivatives up to order k (k = 1 without ddu, k = 2 with it).
struct JetPoint {
    double t = 0.0;
    Vec2 u{};
    Vec2 du{};
    std::optional<Vec2> ddu;

    int order() const { return ddu ? 2 : 1; }
};

/// A candidate differential invariant: a scalar function on jet space
/// together with the jet order it needs.
struct InvariantFn {
    std::function<double(const JetPoint&)> eval;
    std::string label;
    int order = 1;
};

/// Finite-difference step for first-order jet-space partials.
inline constexpr double kJetFdStep = 1e-5;
/// Step for the second directional difference used in the order-2
/// prolongation. 1e-5 would put the rounding term eps/h^2 near 1e-5, far
/// above the 1e-6 invariance budget, so second differences use a wider step.
inline constexpr double kJetFdStep2 = 1e-3;

/// Prolonged action L_g^(k) on a jet: u moves by the action, each derivative
/// vector by the chart Jacobian of L_g at u (both registered actions have
/// point-independent chart Jacobians, which is what makes this exact). Time
/// is untouched: the group acts on dependent variables only.
JetPoint prolonged_action(const Geometry& g, const GroupElement& e, const JetPoint& z);

/// Coefficients (eta, eta^(1)[, eta^(2)]) of the prolonged generator X^(k) at
/// the jet point, by the total-derivative recursion
///   eta^(1) = (d eta / d u) udot,
///   eta^(2) = (d^2 eta / d u^2)[udot, udot] + (d eta / d u) uddot,
/// with the generator partials taken by central finite differences.
/// Returned length is dim + order*dim.
std::vector<double> prolong_generator(const Geometry& g, const JetPoint& z, int order);

/// Directional derivative X^(k)(I) at the jet point: gradient of the
/// invariant by central differences, contracted with prolong_generator.
/// Vanishes (to finite-difference error) exactly when I is invariant.
double apply_prolonged(const Geometry& g, const InvariantFn& inv, const JetPoint& z);

struct InvarianceReport {
    double max_infinitesimal = 0.0;  // worst |X^(k)(I)|
    double max_finite = 0.0;         // worst |I(L_g^(k) z) - I(z)|
    bool pass = false;
    std::string worst_label;
    int n_samples = 0;
};

/// Samples a random jet inside the documented chart ranges (radii in [0.2, 3]
/// or theta in [0.2, pi - 0.2]; derivative components in [-2, 2]).
JetPoint sample_jet(const Geometry& g, int order, Rng& rng);

/// Samples n_samples random jets and checks every candidate both ways:
/// (a) |X^(k)(I)| < tol, (b) |I(prolonged_action(g, z)) - I(z)| < tol for 10
/// random rotations per jet. Numeric failures are reported, not thrown.
InvarianceReport check_invariance(const Geometry& g, const std::vector<InvariantFn>& members,
                                  int order, int n_samples, double tol,
                                  std::uint64_t seed = 12345);

}  // namespace symflow
