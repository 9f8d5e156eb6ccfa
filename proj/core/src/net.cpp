#include "symflow/net.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "symflow/random.hpp"

namespace symflow {

int layer_count(const MlpSpec& spec) { return static_cast<int>(spec.hidden.size()) + 1; }

LayerView layer_view(const MlpSpec& spec, int layer) {
    const int n_layers = layer_count(spec);
    assert(layer >= 0 && layer < n_layers);
    LayerView v;
    int off = 0;
    for (int l = 0; l <= layer; ++l) {
        v.in = l == 0 ? spec.in_dim : spec.hidden[static_cast<std::size_t>(l - 1)];
        v.out = l == n_layers - 1 ? spec.out_dim : spec.hidden[static_cast<std::size_t>(l)];
        v.w_off = off;
        v.b_off = off + v.in * v.out;
        off = v.b_off + v.out;
    }
    return v;
}

int param_count(const MlpSpec& spec) {
    const LayerView last = layer_view(spec, layer_count(spec) - 1);
    return last.b_off + last.out;
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
    ParamVector p;
    p.values.assign(static_cast<std::size_t>(param_count(spec)), 0.0);
    Rng rng(seed);
    const int n_layers = layer_count(spec);
    for (int l = 0; l < n_layers; ++l) {
        const LayerView v = layer_view(spec, l);
        double s = 1.0 / std::sqrt(static_cast<double>(v.in));
        if (l == n_layers - 1) s *= 0.1;
        for (int i = 0; i < v.in * v.out; ++i)
            p.values[static_cast<std::size_t>(v.w_off + i)] = rng.uniform(-s, s);
        // biases stay zero
    }
    return p;
}

void mlp_forward(const MlpSpec& spec, std::span<const double> params, std::span<const double> x,
                 std::span<double> y) {
    if (static_cast<int>(x.size()) != spec.in_dim || static_cast<int>(y.size()) != spec.out_dim)
        throw std::invalid_argument("mlp_forward: dimension mismatch");

    double buf_a[kMaxLayerWidth], buf_b[kMaxLayerWidth];
    const double* in = x.data();
    double* cur = buf_a;
    double* nxt = buf_b;

    const int n_layers = layer_count(spec);
    for (int l = 0; l < n_layers; ++l) {
        const LayerView v = layer_view(spec, l);
        assert(v.out <= kMaxLayerWidth);
        double* out = l == n_layers - 1 ? y.data() : nxt;
        for (int j = 0; j < v.out; ++j) {
            const double* w = params.data() + v.w_off + j * v.in;
            double acc = params[static_cast<std::size_t>(v.b_off + j)];
            for (int i = 0; i < v.in; ++i) acc += w[i] * in[i];
            out[j] = acc;
        }
        if (l != n_layers - 1) {
            for (int j = 0; j < v.out; ++j) out[j] = std::tanh(out[j]);
            std::swap(cur, nxt);
            in = cur;
        }
    }
}

double mlp_forward_scalar(const MlpSpec& spec, std::span<const double> params,
                          std::span<const double> x) {
    double y = 0.0;
    mlp_forward(spec, params, x, std::span<double>(&y, 1));
    return y;
}

}  // namespace symflow
