#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symflow/errors.hpp"
#include "symflow/model.hpp"
#include "symflow/model_field.hpp"
#include "symflow/odeint.hpp"
#include "symflow/random.hpp"

using namespace symflow;

namespace {
constexpr double kPi = std::numbers::pi;

/// Model whose A and B are exact affine functions (no hidden layers):
/// A(x) = wa * x + ba, B(x) = wb * x + bb on the single invariant input.
NodeModel affine_model(GeometryId geometry, ModelKind kind, double wa, double ba, double wb,
                       double bb, double delta_kick = 1e-2) {
    NodeModel m = make_model(geometry, kind, {}, 1, 20, false, delta_kick);
    std::fill(m.params_a.values.begin(), m.params_a.values.end(), 0.0);
    std::fill(m.params_b.values.begin(), m.params_b.values.end(), 0.0);
    m.params_a.values[0] = wa;
    m.params_a.values.back() = ba;
    m.params_b.values[0] = wb;
    m.params_b.values.back() = bb;
    return m;
}

Vec2 random_r2_point(Rng& rng, double lo = 0.5, double hi = 2.5) {
    const double r = rng.uniform(lo, hi);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    return {r * std::cos(a), r * std::sin(a)};
}
}  // namespace

TEST_CASE("A=0, B=1 gives the rigid rotation field") {
    const NodeModel m = affine_model(GeometryId::R2Punctured, ModelKind::Plain, 0, 0, 0, 1);
    const Vec2 q = apply(m, {1.0, 0.0});
    CHECK(q[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-7));
    CHECK(q[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-7));
}

TEST_CASE("sphere model A(theta)=theta, B=0.05 reproduces the closed form") {
    const NodeModel m = affine_model(GeometryId::Sphere2, ModelKind::Plain, 1, 0, 0, 0.05);
    const Vec2 q = apply(m, {0.5, 0.0});
    CHECK(q[0] == doctest::Approx(0.5 * std::numbers::e).epsilon(1e-7));
    CHECK(q[1] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("build_field / build_augmented_field enforce the model kind") {
    const NodeModel plain = make_model(GeometryId::R2Punctured, ModelKind::Plain, {8}, 1);
    const NodeModel aug = make_model(GeometryId::R2Punctured, ModelKind::Augmented, {8}, 1);
    CHECK_THROWS_AS(build_field(aug), std::invalid_argument);
    CHECK_THROWS_AS(build_augmented_field(plain), std::invalid_argument);
    CHECK(build_field(plain).dim_state == 2);
    CHECK(build_augmented_field(aug).dim_state == 4);
    CHECK(plain.invariant_set_label == "r2-so2-order1");
    CHECK(aug.invariant_set_label == "r2-so2-order2");
}

TEST_CASE("zero augmented field with zero kick is the identity") {
    const NodeModel m = affine_model(GeometryId::R2Punctured, ModelKind::Augmented, 0, 0, 0, 0,
                                     /*delta_kick=*/0.0);
    CHECK(m.is_identity());
    const Vec2 p = {1.3, -0.4};
    const Vec2 q = apply(m, p);
    CHECK(q[0] == p[0]);
    CHECK(q[1] == p[1]);
    const Vec2 r = apply_inverse(m, p);
    CHECK(r[0] == p[0]);
    CHECK(r[1] == p[1]);
}

TEST_CASE("zero psi with an initial velocity moves in a straight line") {
    const NodeModel m = affine_model(GeometryId::R2Punctured, ModelKind::Augmented, 0, 0, 0, 0);
    const FieldSpec f = build_augmented_field(m);
    const std::vector<double> lifted = {1.0, 0.5, 0.2, -0.3};  // (u, v)
    const auto out = flow(f, lifted, 1.0);
    CHECK(out[0] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(0.2));
    CHECK(out[3] == doctest::Approx(-0.3));
}

TEST_CASE("augmented psi commutes with rotations (frame equivariance)") {
    const NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Augmented, {16}, 8);
    const FieldSpec f = build_augmented_field(m);
    const Geometry g = make_geometry(GeometryId::R2Punctured);
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const Vec2 u = random_r2_point(rng);
        const Vec2 v = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const GroupElement e{rng.uniform(-kPi, kPi)};
        const double c = std::cos(e.epsilon), s = std::sin(e.epsilon);

        std::vector<double> state = {u[0], u[1], v[0], v[1]};
        std::vector<double> deriv(4);
        f.eval(0.0, state, f.params, deriv);

        std::vector<double> rotated = {c * u[0] - s * u[1], s * u[0] + c * u[1],
                                       c * v[0] - s * v[1], s * v[0] + c * v[1]};
        std::vector<double> deriv_rot(4);
        f.eval(0.0, rotated, f.params, deriv_rot);

        // psi(R u, R v) = R psi(u, v)
        CHECK(std::abs(deriv_rot[2] - (c * deriv[2] - s * deriv[3])) < 1e-9);
        CHECK(std::abs(deriv_rot[3] - (s * deriv[2] + c * deriv[3])) < 1e-9);
    }
}

TEST_CASE("apply_inverse round-trips: plain 1e-5, augmented 1e-4") {
    Rng rng(33);
    const NodeModel plain = make_model(GeometryId::R2Punctured, ModelKind::Plain, {16, 16}, 5);
    const NodeModel aug = make_model(GeometryId::R2Punctured, ModelKind::Augmented, {16, 16}, 6);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p = random_r2_point(rng);
        const Vec2 rp = apply_inverse(plain, apply(plain, p));
        CHECK(std::hypot(rp[0] - p[0], rp[1] - p[1]) < 1e-5);
        const Vec2 ra = apply_inverse(aug, apply(aug, p));
        CHECK(std::hypot(ra[0] - p[0], ra[1] - p[1]) < 1e-4);
    }
    // the other composition order
    for (int i = 0; i < 20; ++i) {
        const Vec2 p = random_r2_point(rng);
        const Vec2 q = apply(aug, apply_inverse(aug, p));
        CHECK(std::hypot(q[0] - p[0], q[1] - p[1]) < 1e-4);
    }
}

TEST_CASE("sphere apply_inverse round-trips through the phi seam") {
    const NodeModel m = make_model(GeometryId::Sphere2, ModelKind::Plain, {16}, 9);
    Rng rng(34);
    for (int i = 0; i < 50; ++i) {
        const Vec2 p = {rng.uniform(0.3, 1.1), rng.uniform(0.0, 2.0 * kPi)};
        const Vec2 rp = apply_inverse(m, apply(m, p));
        CHECK(std::abs(rp[0] - p[0]) < 1e-5);
        CHECK(std::abs(circular_diff(rp[1], p[1])) < 1e-5);
    }
}

TEST_CASE("projection consistency: apply is the projected augmented flow") {
    const NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Augmented, {8, 8}, 13);
    const Vec2 p = {1.2, -0.8};
    const auto final_state =
        integrate(build_augmented_field(m), lift_state(m, p), 0.0, 1.0, m.n_steps).final_state();
    const Vec2 q = apply(m, p);
    CHECK(q[0] == final_state[0]);
    CHECK(q[1] == final_state[1]);
}

TEST_CASE("models are equivariant by construction for any parameters") {
    Rng seeds(90);
    for (auto geometry : {GeometryId::R2Punctured, GeometryId::Sphere2}) {
        for (auto kind : {ModelKind::Plain, ModelKind::Augmented}) {
            for (int k = 0; k < 3; ++k) {
                const NodeModel m = make_model(geometry, kind, {16, 16}, seeds.next_u64());
                const auto rep = check_model_equivariance(m, 50, 1e-5, 777 + k);
                CAPTURE(rep.max_violation);
                CHECK(rep.pass);
            }
        }
    }
}

TEST_CASE("a constant field fails the equivariance check") {
    FieldSpec f;
    f.dim_state = 2;
    f.eval = [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 0.0;
    };
    const Geometry g = make_geometry(GeometryId::R2Punctured);
    const auto rep = check_map_equivariance(
        g,
        [&f](const Vec2& p) {
            const auto out = flow(f, std::vector<double>{p[0], p[1]}, 1.0);
            return Vec2{out[0], out[1]};
        },
        100, 1e-5, 41, default_region(g.id));
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_violation > 0.1);
}

TEST_CASE("apply rejects points outside the chart") {
    const NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Plain, {8}, 2);
    CHECK_THROWS_AS(apply(m, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(apply_inverse(m, {1e-9, 0.0}), DomainError);
}

TEST_CASE("packed parameter round-trip") {
    NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Plain, {8}, 3);
    auto packed = m.packed_params();
    CHECK(static_cast<int>(packed.size()) == m.total_params());
    packed[0] = 17.5;
    packed.back() = -3.25;
    m.set_packed_params(packed);
    CHECK(m.params_a.values[0] == 17.5);
    CHECK(m.params_b.values.back() == -3.25);
    CHECK(m.packed_params() == packed);
}
