#include "symflow/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "symflow/random.hpp"

namespace symflow {

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::Radial: return "radial";
        case ExampleId::Sphere: return "sphere";
        case ExampleId::InverseRadius: return "inverse-radius";
    }
    return "?";
}

ExampleId example_from_string(const std::string& s) {
    if (s == "radial") return ExampleId::Radial;
    if (s == "sphere") return ExampleId::Sphere;
    if (s == "inverse-radius") return ExampleId::InverseRadius;
    throw std::invalid_argument("unknown example '" + s +
                                "' (expected radial, sphere or inverse-radius)");
}

GeometryId example_geometry(ExampleId id) {
    return id == ExampleId::Sphere ? GeometryId::Sphere2 : GeometryId::R2Punctured;
}

ModelKind default_model_kind(ExampleId id) {
    return id == ExampleId::InverseRadius ? ModelKind::Augmented : ModelKind::Plain;
}

int default_epochs(ExampleId id) {
    switch (id) {
        case ExampleId::Radial: return 300;
        case ExampleId::Sphere: return 400;
        case ExampleId::InverseRadius: return 1000;
    }
    return 0;
}

Vec2 ground_truth_map(ExampleId id, const Vec2& p) {
    switch (id) {
        case ExampleId::Radial: {
            const double r = std::hypot(p[0], p[1]);
            return {p[0] + p[0] / r, p[1] + p[1] / r};
        }
        case ExampleId::Sphere: {
            // keep the target strictly inside the open chart interval
            const double theta_max = std::numbers::pi - Geometry::kThetaMin - 1e-9;
            const double theta = std::min(p[0] * std::numbers::e, theta_max);
            return {theta, wrap_angle(p[1] + 0.05)};
        }
        case ExampleId::InverseRadius: {
            const double r2 = p[0] * p[0] + p[1] * p[1];
            return {p[0] / r2, p[1] / r2};
        }
    }
    throw std::invalid_argument("bad example id");
}

namespace {

void add_grid(Dataset& ds, int n_per_axis) {
    for (int i = 0; i < n_per_axis; ++i) {
        for (int j = 0; j < n_per_axis; ++j) {
            const Vec2 p = {-2.0 + 4.0 * i / (n_per_axis - 1),
                            -2.0 + 4.0 * j / (n_per_axis - 1)};
            if (std::hypot(p[0], p[1]) < kGridExclusionRadius) continue;
            ds.inputs.push_back(p);
            ds.targets.push_back(ground_truth_map(ds.example, p));
        }
    }
}

}  // namespace

Dataset make_dataset(ExampleId id, std::uint64_t seed) {
    Dataset ds;
    ds.example = id;
    ds.geometry = example_geometry(id);

    switch (id) {
        case ExampleId::Radial:
            add_grid(ds, 8);
            break;
        case ExampleId::InverseRadius:
            add_grid(ds, 10);
            break;
        case ExampleId::Sphere: {
            const Geometry g = make_geometry(GeometryId::Sphere2);
            Rng rng(seed);
            while (ds.inputs.size() < 400) {
                // area-uniform on the sphere: cos(theta) uniform in (-1, 1)
                const double c = 1.0 - 2.0 * rng.uniform();
                const Vec2 p = {std::acos(c), rng.uniform(0.0, 2.0 * std::numbers::pi)};
                if (!contains(g, p)) continue;
                ds.inputs.push_back(p);
                ds.targets.push_back(ground_truth_map(id, p));
            }
            break;
        }
    }
    return ds;
}

}  // namespace symflow
