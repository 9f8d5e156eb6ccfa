#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symflow/invariants.hpp"
#include "symflow/jet.hpp"
#include "symflow/manifold.hpp"

using namespace symflow;

namespace {
const Geometry kR2 = make_geometry(GeometryId::R2Punctured);
const Geometry kS2 = make_geometry(GeometryId::Sphere2);
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("prolonged action rotates every derivative vector") {
    JetPoint z;
    z.u = {1.0, 0.0};
    z.du = {0.0, 2.0};
    const JetPoint w = prolonged_action(kR2, {kPi / 2.0}, z);
    CHECK(w.u[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(w.u[1] == doctest::Approx(1.0));
    CHECK(w.du[0] == doctest::Approx(-2.0));
    CHECK(w.du[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(w.t == z.t);

    const JetPoint id = prolonged_action(kR2, {0.0}, z);
    CHECK(id.u[0] == 1.0);
    CHECK(id.du[1] == 2.0);

    JetPoint zs;
    zs.u = {0.5, 0.0};
    zs.du = {0.3, -0.4};
    zs.ddu = Vec2{0.7, 0.9};
    const JetPoint ws = prolonged_action(kS2, {1.0}, zs);
    CHECK(ws.u[0] == 0.5);
    CHECK(ws.u[1] == doctest::Approx(1.0));
    CHECK(ws.du[0] == 0.3);
    CHECK((*ws.ddu)[1] == 0.9);
}

TEST_CASE("prolonged action is a group action on jets") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const JetPoint z = sample_jet(kR2, 2, rng);
        const double e1 = rng.uniform(-kPi, kPi), e2 = rng.uniform(-kPi, kPi);
        const JetPoint a = prolonged_action(kR2, {e1}, prolonged_action(kR2, {e2}, z));
        const JetPoint b = prolonged_action(kR2, {e1 + e2}, z);
        for (int c = 0; c < 2; ++c) {
            CHECK(std::abs(a.u[c] - b.u[c]) < 1e-12);
            CHECK(std::abs(a.du[c] - b.du[c]) < 1e-12);
            CHECK(std::abs((*a.ddu)[c] - (*b.ddu)[c]) < 1e-12);
        }
    }
}

TEST_CASE("prolong_generator matches the closed form on the plane") {
    JetPoint z;
    z.u = {1.0, 2.0};
    z.du = {3.0, 4.0};
    const auto c1 = prolong_generator(kR2, z, 1);
    REQUIRE(c1.size() == 4);
    CHECK(c1[0] == doctest::Approx(-2.0));
    CHECK(c1[1] == doctest::Approx(1.0));
    CHECK(c1[2] == doctest::Approx(-4.0).epsilon(1e-9));
    CHECK(c1[3] == doctest::Approx(3.0).epsilon(1e-9));

    JetPoint z2;
    z2.u = {1.0, 0.0};
    z2.du = {0.0, 0.0};
    z2.ddu = Vec2{5.0, 6.0};
    const auto c2 = prolong_generator(kR2, z2, 2);
    REQUIRE(c2.size() == 6);
    CHECK(c2[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(c2[1] == doctest::Approx(1.0));
    CHECK(c2[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(c2[3] == doctest::Approx(0.0).scale(1.0));
    CHECK(c2[4] == doctest::Approx(-6.0).epsilon(1e-7));
    CHECK(c2[5] == doctest::Approx(5.0).epsilon(1e-7));

    // closed form (-y, x, -ydot, xdot) at random jets, within the FD budget
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const JetPoint w = sample_jet(kR2, 1, rng);
        const auto c = prolong_generator(kR2, w, 1);
        CHECK(std::abs(c[0] + w.u[1]) < 1e-7);
        CHECK(std::abs(c[1] - w.u[0]) < 1e-7);
        CHECK(std::abs(c[2] + w.du[1]) < 1e-7);
        CHECK(std::abs(c[3] - w.du[0]) < 1e-7);
    }
}

TEST_CASE("prolong_generator on the sphere is constant (0,1,0,...)") {
    Rng rng(9);
    const JetPoint z = sample_jet(kS2, 2, rng);
    const auto c = prolong_generator(kS2, z, 2);
    REQUIRE(c.size() == 6);
    CHECK(c[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(c[1] == doctest::Approx(1.0));
    for (int i = 2; i < 6; ++i) CHECK(std::abs(c[i]) < 1e-7);
}

TEST_CASE("prolong_generator agrees with the epsilon-derivative of the prolonged action") {
    // independent oracle: X^(k) generates the prolonged one-parameter group
    Rng rng(23);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const JetPoint z = sample_jet(kR2, 2, rng);
        const JetPoint plus = prolonged_action(kR2, {h}, z);
        const JetPoint minus = prolonged_action(kR2, {-h}, z);
        const auto c = prolong_generator(kR2, z, 2);
        const double fd[6] = {(plus.u[0] - minus.u[0]) / (2 * h),
                              (plus.u[1] - minus.u[1]) / (2 * h),
                              (plus.du[0] - minus.du[0]) / (2 * h),
                              (plus.du[1] - minus.du[1]) / (2 * h),
                              ((*plus.ddu)[0] - (*minus.ddu)[0]) / (2 * h),
                              ((*plus.ddu)[1] - (*minus.ddu)[1]) / (2 * h)};
        for (int k = 0; k < 6; ++k) CHECK(std::abs(c[k] - fd[k]) < 1e-6);
    }
}

TEST_CASE("apply_prolonged annihilates invariants and differentiates non-invariants") {
    InvariantFn i4{[](const JetPoint& z) { return z.u[0] * z.du[1] - z.u[1] * z.du[0]; },
                   "r^2*thetadot", 1};
    JetPoint z;
    z.u = {1.0, 0.0};
    z.du = {0.0, 2.0};
    CHECK(std::abs(apply_prolonged(kR2, i4, z)) < 1e-7);

    InvariantFn coord_x{[](const JetPoint& w) { return w.u[0]; }, "x", 1};
    CHECK(std::abs(apply_prolonged(kR2, coord_x, z)) < 1e-7);  // X(x) = -y = 0 here
    JetPoint z01;
    z01.u = {0.0, 1.0};
    z01.du = {0.0, 0.0};
    CHECK(apply_prolonged(kR2, coord_x, z01) == doctest::Approx(-1.0).epsilon(1e-7));

    InvariantFn radius{[](const JetPoint& w) { return std::hypot(w.u[0], w.u[1]); }, "r", 1};
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const JetPoint w = sample_jet(kR2, 1, rng);
        CHECK(std::abs(apply_prolonged(kR2, radius, w)) < 1e-7);
    }
}

TEST_CASE("check_invariance passes the registered sets") {
    const auto r2o1 = invariant_registry(GeometryId::R2Punctured, 1);
    const auto rep = check_invariance(kR2, r2o1.members, 1, 1000, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.max_infinitesimal < 1e-6);
    CHECK(rep.max_finite < 1e-9);

    const auto s2o1 = invariant_registry(GeometryId::Sphere2, 1);
    CHECK(check_invariance(kS2, s2o1.members, 1, 500, 1e-6).pass);
}

TEST_CASE("check_invariance flags a broken candidate with its label") {
    auto members = invariant_registry(GeometryId::R2Punctured, 1).members;
    members.push_back({[](const JetPoint& z) { return z.u[0]; }, "x", 1});
    const auto rep = check_invariance(kR2, members, 1, 200, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_label == "x");
    CHECK(rep.max_infinitesimal > 1e-3);
}

TEST_CASE("infinitesimal and finite invariance tests agree on the registered sets") {
    // anything passing |X(I)| < 1e-6 passes the finite test at 1e-5 and vice versa
    for (auto geometry : {GeometryId::R2Punctured, GeometryId::Sphere2}) {
        const Geometry g = make_geometry(geometry);
        for (int order : {1, 2}) {
            const auto set = invariant_registry(geometry, order);
            const auto rep = check_invariance(g, set.members, order, 300, 1e-6, 99);
            CHECK(rep.max_infinitesimal < 1e-6);
            CHECK(rep.max_finite < 1e-5);
        }
    }
}
