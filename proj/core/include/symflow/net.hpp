#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace symflow {

enum class Activation { Tanh };

/// Fully connected feed-forward network shape: affine-tanh-...-affine.
struct MlpSpec {
    int in_dim = 1;
    int out_dim = 1;
    std::vector<int> hidden;
    Activation activation = Activation::Tanh;
};

/// Compile-time cap on layer width for stack scratch buffers.
inline constexpr int kMaxLayerWidth = 256;

int layer_count(const MlpSpec& spec);

/// Flat-parameter layout: per layer, weights row-major (out x in) then biases.
struct LayerView {
    int in = 0, out = 0;
    int w_off = 0, b_off = 0;
};
LayerView layer_view(const MlpSpec& spec, int layer);

int param_count(const MlpSpec& spec);

/// Flat parameter vector; layout derived from an MlpSpec.
struct ParamVector {
    std::vector<double> values;
};

/// Seeded deterministic init: weights uniform(-s, s) with s = 1/sqrt(fan_in),
/// biases zero. Final-layer weights are scaled by 0.1 so a fresh model's
/// vector field is near zero and its flow near the identity.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);

/// Plain forward evaluation. x.size() == in_dim, y.size() == out_dim.
void mlp_forward(const MlpSpec& spec, std::span<const double> params, std::span<const double> x,
                 std::span<double> y);

/// Convenience for out_dim == 1 networks.
double mlp_forward_scalar(const MlpSpec& spec, std::span<const double> params,
                          std::span<const double> x);

}  // namespace symflow
