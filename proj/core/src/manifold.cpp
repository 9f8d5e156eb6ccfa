#include "symflow/manifold.hpp"

#include <cmath>
#include <numbers>

#include "symflow/errors.hpp"

namespace symflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void throw_outside(const Geometry& g, const Vec2& p) {
    throw DomainError("point (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                      ") outside chart of " + g.name());
}
}  // namespace

std::string Geometry::name() const {
    return id == GeometryId::R2Punctured ? "r2-so2" : "s2-so2";
}

Geometry make_geometry(GeometryId id) { return Geometry{id}; }

Geometry geometry_from_name(const std::string& name) {
    if (name == "r2-so2") return make_geometry(GeometryId::R2Punctured);
    if (name == "s2-so2") return make_geometry(GeometryId::Sphere2);
    throw UnsupportedGeometryError("unknown geometry '" + name + "' (expected r2-so2 or s2-so2)");
}

double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod can return exactly 2*pi after the correction when phi is a tiny
    // negative number
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double circular_diff(double a, double b) { return std::remainder(a - b, kTwoPi); }

bool contains(const Geometry& g, const Vec2& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return false;
    switch (g.id) {
        case GeometryId::R2Punctured:
            return std::hypot(p[0], p[1]) >= Geometry::kRMin;
        case GeometryId::Sphere2:
            return p[0] > Geometry::kThetaMin && p[0] < std::numbers::pi - Geometry::kThetaMin;
    }
    return false;
}

Vec2 act(const Geometry& g, const GroupElement& e, const Vec2& p) {
    if (!contains(g, p)) throw_outside(g, p);
    switch (g.id) {
        case GeometryId::R2Punctured: {
            const double c = std::cos(e.epsilon), s = std::sin(e.epsilon);
            return {p[0] * c - p[1] * s, p[0] * s + p[1] * c};
        }
        case GeometryId::Sphere2:
            return {p[0], wrap_angle(p[1] + e.epsilon)};
    }
    throw_outside(g, p);
}

Mat2 action_jacobian(const Geometry& g, const GroupElement& e, const Vec2& p) {
    if (!contains(g, p)) throw_outside(g, p);
    switch (g.id) {
        case GeometryId::R2Punctured: {
            const double c = std::cos(e.epsilon), s = std::sin(e.epsilon);
            return {{{c, -s}, {s, c}}};
        }
        case GeometryId::Sphere2:
            return {{{1.0, 0.0}, {0.0, 1.0}}};
    }
    throw_outside(g, p);
}

Mat2 action_jacobian_fd(const Geometry& g, const GroupElement& e, const Vec2& p, double eps) {
    Mat2 j{};
    for (int col = 0; col < 2; ++col) {
        Vec2 hi = p, lo = p;
        hi[col] += eps;
        lo[col] -= eps;
        // differentiate the unwrapped action so the phi seam does not show up
        // in the difference quotient
        Vec2 ahi = act(g, e, hi), alo = act(g, e, lo);
        for (int row = 0; row < 2; ++row) {
            double d = ahi[row] - alo[row];
            if (g.id == GeometryId::Sphere2 && row == 1) d = circular_diff(ahi[row], alo[row]);
            j[row][col] = d / (2.0 * eps);
        }
    }
    return j;
}

TangentVector pushforward(const Geometry& g, const GroupElement& e, const TangentVector& v) {
    const Mat2 j = action_jacobian(g, e, v.base);
    TangentVector out;
    out.base = act(g, e, v.base);
    out.components = {j[0][0] * v.components[0] + j[0][1] * v.components[1],
                      j[1][0] * v.components[0] + j[1][1] * v.components[1]};
    return out;
}

TangentVector generator_value(const Geometry& g, const Vec2& p) {
    if (!contains(g, p)) throw_outside(g, p);
    switch (g.id) {
        case GeometryId::R2Punctured:
            return {p, {-p[1], p[0]}};
        case GeometryId::Sphere2:
            return {p, {0.0, 1.0}};
    }
    throw_outside(g, p);
}

double det2(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

}  // namespace symflow
