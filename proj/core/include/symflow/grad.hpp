#pragma once

#include <vector>

#include "symflow/manifold.hpp"
#include "symflow/model.hpp"

namespace symflow {

enum class LossKind {
    SquaredEuclidean,  // |pred - target|^2 in chart coordinates
    SphereChart,       // dtheta^2 + circular(dphi)^2
};

LossKind default_loss(GeometryId geometry);

struct Batch {
    std::vector<Vec2> inputs;
    std::vector<Vec2> targets;
};

struct FlowGradResult {
    double loss = 0.0;           // mean per-sample loss
    std::vector<double> grad;    // d(loss)/d(packed [A | B] params)
    int clamp_events = 0;        // chart-guard clamps during the taped flows
};

/// Mean loss over the batch and its exact reverse-mode gradient with respect
/// to all network parameters, propagated through every RK4 stage and MLP
/// evaluation recorded on a tape during the forward pass. Chart-guard
/// violations mid-flow are clamped (and counted) rather than thrown, so an
/// early-training epoch cannot abort. Per-sample gradients land in
/// per-sample slots and are reduced in sample order, making the result
/// independent of thread scheduling. Throws NumericError (with the sample
/// index) on a non-finite loss or gradient.
FlowGradResult grad_through_flow(const NodeModel& model, const Batch& batch, LossKind kind,
                                 int n_threads = 1);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double tape_value = 0.0, fd_value = 0.0;  // at the worst coordinate
    bool pass = false;
};

/// Tape gradient against a central finite-difference oracle over the same
/// taped loss, coordinate by coordinate. Relative error uses the floor
/// max(|g|, |fd|, 1e-5) so coordinates below finite-difference resolution
/// compare absolutely.
GradCheckResult gradcheck(const NodeModel& model, const Batch& batch, LossKind kind,
                          double fd_eps = 1e-5, double tol = 1e-4);

}  // namespace symflow
