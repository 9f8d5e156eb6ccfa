#include "symflow/invariants.hpp"

#include <cmath>

#include "symflow/errors.hpp"

namespace symflow {

PolarJet polar_jet(const JetPoint& z, bool second_order) {
    const double x = z.u[0], y = z.u[1];
    const double xd = z.du[0], yd = z.du[1];
    PolarJet p{};
    p.r = std::hypot(x, y);
    p.rdot = (x * xd + y * yd) / p.r;
    p.thetadot = (x * yd - y * xd) / (p.r * p.r);
    if (second_order) {
        const double xdd = (*z.ddu)[0], ydd = (*z.ddu)[1];
        p.rddot = (xd * xd + yd * yd + x * xdd + y * ydd) / p.r - p.rdot * p.rdot / p.r;
        p.thetaddot = (x * ydd - y * xdd) / (p.r * p.r) - 2.0 * p.rdot * p.thetadot / p.r;
    }
    return p;
}

InvariantSet invariant_registry(GeometryId geometry, int order) {
    if (order != 1 && order != 2)
        throw UnsupportedGeometryError("invariant registry: order must be 1 or 2");

    InvariantSet set;
    set.geometry = geometry;
    set.order = order;

    auto add = [&](std::string label, int ord, std::function<double(const JetPoint&)> f) {
        set.members.push_back(InvariantFn{std::move(f), std::move(label), ord});
    };

    add("t", 1, [](const JetPoint& z) { return z.t; });

    if (geometry == GeometryId::R2Punctured) {
        set.label = order == 1 ? "r2-so2-order1" : "r2-so2-order2";
        add("r", 1, [](const JetPoint& z) { return std::hypot(z.u[0], z.u[1]); });
        add("r*rdot", 1, [](const JetPoint& z) { return z.u[0] * z.du[0] + z.u[1] * z.du[1]; });
        add("r^2*thetadot", 1,
            [](const JetPoint& z) { return z.u[0] * z.du[1] - z.u[1] * z.du[0]; });
        if (order == 2) {
            add("r^3*rddot", 2, [](const JetPoint& z) {
                const PolarJet p = polar_jet(z, true);
                return p.r * p.r * p.r * p.rddot;
            });
            add("r^4*thetaddot", 2, [](const JetPoint& z) {
                const PolarJet p = polar_jet(z, true);
                return p.r * p.r * p.r * p.r * p.thetaddot;
            });
        }
    } else {
        set.label = order == 1 ? "s2-so2-order1" : "s2-so2-order2";
        add("theta", 1, [](const JetPoint& z) { return z.u[0]; });
        add("thetadot", 1, [](const JetPoint& z) { return z.du[0]; });
        add("phidot", 1, [](const JetPoint& z) { return z.du[1]; });
        if (order == 2) {
            add("thetaddot", 2, [](const JetPoint& z) { return (*z.ddu)[0]; });
            add("phiddot", 2, [](const JetPoint& z) { return (*z.ddu)[1]; });
        }
    }
    set.mu = static_cast<int>(set.members.size());
    return set;
}

InvariantSet invariant_registry(const std::string& label) {
    if (label == "r2-so2-order1") return invariant_registry(GeometryId::R2Punctured, 1);
    if (label == "r2-so2-order2") return invariant_registry(GeometryId::R2Punctured, 2);
    if (label == "s2-so2-order1") return invariant_registry(GeometryId::Sphere2, 1);
    if (label == "s2-so2-order2") return invariant_registry(GeometryId::Sphere2, 2);
    throw UnsupportedGeometryError("unknown invariant set label '" + label + "'");
}

std::vector<double> evaluate(const InvariantSet& set, const JetPoint& z) {
    if (z.order() < set.order) throw DomainError("jet order below invariant-set order");
    if (!contains(make_geometry(set.geometry), z.u))
        throw DomainError("jet base point outside chart");
    std::vector<double> out;
    out.reserve(set.members.size());
    for (const InvariantFn& inv : set.members) out.push_back(inv.eval(z));
    return out;
}

}  // namespace symflow
