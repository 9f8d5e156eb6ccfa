#pragma once

#include <string>
#include <vector>

#include "symflow/jet.hpp"
#include "symflow/manifold.hpp"

namespace symflow {

/// Ordered set of differential invariants for a (geometry, order) pair.
/// The first member is always I1 = t; mu == members.size().
struct InvariantSet {
    GeometryId geometry;
    int order = 1;
    std::vector<InvariantFn> members;
    int mu = 0;
    std::string label;  // e.g. "r2-so2-order1", persisted in checkpoints
};

/// Registered invariant sets:
///   (r2-so2, 1): { t, r, r*rdot, r^2*thetadot }
///   (r2-so2, 2): adds { r^3*rddot, r^4*thetaddot }
///   (s2-so2, 1): { t, theta, thetadot, phidot }
///   (s2-so2, 2): adds { thetaddot, phiddot }
/// Throws UnsupportedGeometryError for anything else.
InvariantSet invariant_registry(GeometryId geometry, int order);

InvariantSet invariant_registry(const std::string& label);

/// Member-wise evaluation at a jet, order preserved. Length mu.
std::vector<double> evaluate(const InvariantSet& set, const JetPoint& z);

/// Polar derivatives of a Cartesian jet on the punctured plane, via the
/// chain-rule expressions (rddot/thetaddot need an order-2 jet).
struct PolarJet {
    double r, rdot, thetadot;
    double rddot = 0.0, thetaddot = 0.0;
};
PolarJet polar_jet(const JetPoint& z, bool second_order);

}  // namespace symflow
