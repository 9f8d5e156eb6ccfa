#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symflow/manifold.hpp"
#include "symflow/net.hpp"
#include "symflow/odeint.hpp"

namespace symflow {

enum class ModelKind { Plain, Augmented };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// An invariant-parameterized equivariant NODE. PLAIN integrates a
/// first-order field on M; AUGMENTED integrates on TM (state (u, udot)) and
/// projects. The free functions A and B are feed-forward networks whose
/// parameters are the trainable state.
struct NodeModel {
    GeometryId geometry = GeometryId::R2Punctured;
    ModelKind kind = ModelKind::Plain;
    std::string invariant_set_label;
    MlpSpec spec_a, spec_b;
    ParamVector params_a, params_b;
    int n_steps = 20;
    bool include_time = false;
    /// Magnitude of the radial initial velocity given to augmented lifts.
    /// With udot(0) = 0 exactly the augmented field has psi = 0 forever (the
    /// frame vanishes), so lifts start with the equivariant kick
    /// udot(0) = delta * u/r (R2) or (delta, 0) (sphere). Zero disables it.
    double delta_kick = 1e-2;

    int a_param_offset() const { return 0; }
    int b_param_offset() const { return param_count(spec_a); }
    int total_params() const { return param_count(spec_a) + param_count(spec_b); }
    int state_dim() const { return kind == ModelKind::Plain ? 2 : 4; }

    std::vector<double> packed_params() const;
    void set_packed_params(std::span<const double> packed);

    /// True when every parameter is zero and no lift kick applies, in which
    /// case the model map is the identity exactly.
    bool is_identity() const;
};

/// Builds a model with seeded near-identity parameters (A from seed, B from
/// seed + 1). Network input width is the number of non-time invariants fed
/// (1 for plain, 3 for augmented), plus one when include_time is set.
NodeModel make_model(GeometryId geometry, ModelKind kind, const std::vector<int>& hidden,
                     std::uint64_t seed, int n_steps = 20, bool include_time = false,
                     double delta_kick = 1e-2);

/// First-order FieldSpec of a PLAIN model. The returned params are the packed
/// [A | B] vector; eval reads the params argument, so callers may perturb
/// them (finite-difference oracles do).
FieldSpec build_field(const NodeModel& m);

/// TM FieldSpec (state dimension 4) of an AUGMENTED model.
FieldSpec build_augmented_field(const NodeModel& m);

FieldSpec build_model_field(const NodeModel& m);  // dispatch on kind

/// Post-step guard for evaluation flows: wraps phi on the sphere and reports
/// chart exit (integrate turns that into FlowLeftChartError).
StepGuard chart_guard(const NodeModel& m);

/// Initial TM state of the augmented lift at p.
std::vector<double> lift_state(const NodeModel& m, const Vec2& p);

/// The model diffeomorphism h. PLAIN: flow to t=1. AUGMENTED: lift, flow,
/// project onto the base.
Vec2 apply(const NodeModel& m, Vec2 p);

/// h^{-1}. PLAIN: reverse-time flow from t=1 to t=0. AUGMENTED: the map
/// includes a non-invertible lift-then-project, so the inverse is computed
/// by damped Gauss-Newton on u(0) minimizing |apply(u0) - p|^2 with
/// finite-difference Jacobians, initial guess p. Throws ConvergenceError
/// after 100 iterations.
Vec2 apply_inverse(const NodeModel& m, Vec2 p);

struct EquivarianceReport {
    double max_violation = 0.0;
    bool pass = false;
    GroupElement worst_g{};
    Vec2 worst_p{};
    int n_samples = 0;
};

/// Sampling window for equivariance checks: radius range on R2, theta range
/// on the sphere.
struct SampleRegion {
    double lo, hi;
};
SampleRegion default_region(GeometryId geometry);

/// Checks |L_g h(p) - h(L_g p)| over random (g, p) for an arbitrary map.
EquivarianceReport check_map_equivariance(const Geometry& g,
                                          const std::function<Vec2(const Vec2&)>& h,
                                          int n_samples, double tol, std::uint64_t seed,
                                          SampleRegion region);

/// Same check for the model map (equivariant by construction; violations are
/// integrator roundoff).
EquivarianceReport check_model_equivariance(const NodeModel& m, int n_samples, double tol,
                                            std::uint64_t seed = 2024);
EquivarianceReport check_model_equivariance(const NodeModel& m, int n_samples, double tol,
                                            std::uint64_t seed, SampleRegion region);

/// Forward/inverse pair used by the field-transform operations. Models
/// convert via as_diffeo; exact closures (tests, reference maps) construct
/// one directly.
struct Diffeo {
    GeometryId geometry = GeometryId::R2Punctured;
    std::function<Vec2(const Vec2&)> fwd;
    std::function<Vec2(const Vec2&)> inv;
    bool exact_identity = false;
};

Diffeo as_diffeo(const NodeModel& m);

}  // namespace symflow
