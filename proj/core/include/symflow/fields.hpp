#pragma once

#include <functional>
#include <string>

#include "symflow/manifold.hpp"
#include "symflow/model.hpp"

namespace symflow {

struct ScalarField {
    std::function<double(const Vec2&)> eval;
    std::string label;
};

/// Chart density with respect to the chart coordinate volume (dx dy, or
/// d(theta) d(phi) on the sphere chart). Normalization is not enforced; the
/// transform preserves it when present.
struct Density {
    std::function<double(const Vec2&)> eval;
    std::string label;
};

struct VectorFieldOnM {
    std::function<Vec2(const Vec2&)> eval;
    std::string label;
};

/// Central finite-difference Jacobian of a point map (default eps 1e-5). The
/// point must sit inside the chart by more than eps.
Mat2 map_jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& p, double eps = 1e-5);

/// f_h = f o h^{-1}. Exact-identity maps short-circuit (no numeric path).
ScalarField transform_scalar(const Diffeo& h, const ScalarField& f);
ScalarField transform_scalar(const NodeModel& model, const ScalarField& f);

/// rho_h(p) = rho(h^{-1}(p)) |det J_{h^{-1}}(p)|.
Density transform_density(const Diffeo& h, const Density& rho);
Density transform_density(const NodeModel& model, const Density& rho);

/// Push-forward of V along h: V_h(p) = J_h(h^{-1}(p)) V(h^{-1}(p)).
VectorFieldOnM transform_vector(const Diffeo& h, const VectorFieldOnM& v);
VectorFieldOnM transform_vector(const NodeModel& model, const VectorFieldOnM& v);

struct FieldCheckReport {
    bool pass = false;
    bool input_ok = false;         // the untransformed field satisfied its own check
    double input_violation = 0.0;  // worst violation for the input field
    double max_violation = 0.0;    // worst violation for the transformed field
    int degenerate_jacobians = 0;  // |det| < 1e-12 events while sampling
    int n_samples = 0;
};

/// Verifies the density equivariance identity rho(p) = rho(L_g^{-1} p)
/// |det J_{L_g^{-1}}(p)| for rho and for rho_h = transform_density(h, rho)
/// at random (g, p). Rotations have unit determinant on both registered
/// geometries, so the identity reduces to invariance; the determinant factor
/// is kept for generality.
FieldCheckReport check_density_equivariance(const Geometry& g, const Density& rho,
                                            const Diffeo& h, int n_samples, double tol,
                                            std::uint64_t seed, SampleRegion region);
FieldCheckReport check_density_equivariance(const Geometry& g, const Density& rho,
                                            const NodeModel& model, int n_samples, double tol,
                                            std::uint64_t seed = 7);

/// Verifies V(L_g p) = (L_g)_* V(p) for the input field, then the same for
/// V_h = transform_vector(h, V).
FieldCheckReport check_vector_equivariance(const Geometry& g, const VectorFieldOnM& v,
                                           const Diffeo& h, int n_samples, double tol,
                                           std::uint64_t seed, SampleRegion region);
FieldCheckReport check_vector_equivariance(const Geometry& g, const VectorFieldOnM& v,
                                           const NodeModel& model, int n_samples, double tol,
                                           std::uint64_t seed = 7);

}  // namespace symflow
