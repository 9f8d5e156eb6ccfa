#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symflow/manifold.hpp"
#include "symflow/model.hpp"

namespace symflow {

enum class ExampleId { Radial, Sphere, InverseRadius };

std::string to_string(ExampleId id);
ExampleId example_from_string(const std::string& s);
GeometryId example_geometry(ExampleId id);
ModelKind default_model_kind(ExampleId id);
int default_epochs(ExampleId id);  // 300 / 400 / 1000

/// Grid points closer to the puncture than this are dropped from the R2
/// datasets (1/r targets blow up near the origin).
inline constexpr double kGridExclusionRadius = 0.3;

/// Target maps of the three experiments:
///   Radial:        h(p) = p + p/r            (unit radial translation)
///   Sphere:        h(theta, phi) = (theta*e, phi + 0.05), theta clamped to
///                  the chart
///   InverseRadius: h(r, theta) = (1/r, theta) in Cartesian form p/r^2
Vec2 ground_truth_map(ExampleId id, const Vec2& p);

struct Dataset {
    ExampleId example;
    GeometryId geometry;
    std::vector<Vec2> inputs;
    std::vector<Vec2> targets;
};

/// Radial: 8x8 grid on [-2,2]^2 minus the exclusion disc. Sphere: 400 seeded
/// area-uniform points, chart-guard filtered. InverseRadius: 10x10 grid minus
/// the exclusion disc. Targets are exact images under ground_truth_map.
Dataset make_dataset(ExampleId id, std::uint64_t seed);

}  // namespace symflow
