#pragma once

#include <array>
#include <string>

namespace symflow {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class GeometryId {
    R2Punctured,  // R^2 \ {0}, SO(2) acting by rotation about the origin
    Sphere2,      // S^2 in (theta, phi) chart, SO(2) acting by phi-shift
};

/// Rotation angle in radians; the single parameter of SO(2). Any real value is
/// accepted, the action is 2*pi periodic.
struct GroupElement {
    double epsilon = 0.0;
};

struct TangentVector {
    Vec2 base{};
    Vec2 components{};
};

/// Chart-based geometry with a registered SO(2) action. Chart dimension is 2
/// for both registered geometries. Values are immutable and freely shareable.
struct Geometry {
    GeometryId id;
    int dim = 2;

    /// Minimum radius kept inside the punctured-plane chart. Keeps invariant
    /// denominators (1/r and friends) bounded.
    static constexpr double kRMin = 1e-3;
    /// Polar-angle margin excluded around both poles of the sphere chart.
    static constexpr double kThetaMin = 1e-2;

    std::string name() const;
};

Geometry make_geometry(GeometryId id);
Geometry geometry_from_name(const std::string& name);  // "r2-so2" | "s2-so2"

/// Wraps an azimuthal angle to [0, 2*pi).
double wrap_angle(double phi);

/// Circular difference phi_a - phi_b mapped to (-pi, pi].
double circular_diff(double a, double b);

/// True iff the point satisfies the geometry's chart invariants (phi is
/// wrapped before the test on the sphere).
bool contains(const Geometry& g, const Vec2& p);

/// Left action L_eps. Throws DomainError if the point is outside the chart.
Vec2 act(const Geometry& g, const GroupElement& e, const Vec2& p);

/// Push-forward (L_eps)_*: base moved by act, components by the chart
/// Jacobian of L_eps at the base point.
TangentVector pushforward(const Geometry& g, const GroupElement& e, const TangentVector& v);

/// Value of the SO(2) generator at a point: (-y, x) on the punctured plane,
/// (0, 1) on the sphere chart.
TangentVector generator_value(const Geometry& g, const Vec2& p);

/// Chart Jacobian of p -> L_eps p (analytic form).
Mat2 action_jacobian(const Geometry& g, const GroupElement& e, const Vec2& p);

/// Central finite-difference cross-check of action_jacobian.
Mat2 action_jacobian_fd(const Geometry& g, const GroupElement& e, const Vec2& p, double eps = 1e-6);

double det2(const Mat2& m);

}  // namespace symflow
