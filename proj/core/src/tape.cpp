#include "symflow/tape.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace symflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_2pi(double x) {
    double w = std::fmod(x, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}
}  // namespace

Tape::Tape(std::span<const double> params) : params_(params) {
    pgrad_.assign(params.size(), 0.0);
    nodes_.reserve(1 << 12);
    vals_.reserve(1 << 15);
}

void Tape::rebind(std::span<const double> params) {
    assert(params.size() == pgrad_.size());
    params_ = params;
}

void Tape::reset() {
    nodes_.clear();
    vals_.clear();
    adj_.clear();
    pool_.clear();
    clamp_events_ = 0;
}

std::int32_t Tape::new_var(double value) {
    vals_.push_back(value);
    return static_cast<std::int32_t>(vals_.size()) - 1;
}

TVar Tape::constant(double v) {
    Node n{Op::Const};
    n.out = new_var(v);
    nodes_.push_back(n);
    return {this, n.out};
}

TVar Tape::unary(Op op, TVar a, double c0, double c1) {
    assert(a.tape == this);
    const double x = vals_[static_cast<std::size_t>(a.idx)];
    double y = 0.0;
    switch (op) {
        case Op::Neg: y = -x; break;
        case Op::Sqrt: y = std::sqrt(x); break;
        case Op::Tanh: y = std::tanh(x); break;
        case Op::MulConst: y = x * c0; break;
        case Op::AddConst: y = x + c0; break;
        case Op::Clamp:
            y = x < c0 ? c0 : (x > c1 ? c1 : x);
            if (y != x) ++clamp_events_;
            break;
        case Op::Wrap2Pi: y = wrap_to_2pi(x); break;
        case Op::PrincipalAngle: y = std::remainder(x, kTwoPi); break;
        default: assert(false);
    }
    Node n{op};
    n.a = a.idx;
    n.c0 = c0;
    n.c1 = c1;
    n.out = new_var(y);
    nodes_.push_back(n);
    return {this, n.out};
}

TVar Tape::binary(Op op, TVar a, TVar b) {
    assert(a.tape == this && b.tape == this);
    const double x = vals_[static_cast<std::size_t>(a.idx)];
    const double y = vals_[static_cast<std::size_t>(b.idx)];
    double z = 0.0;
    switch (op) {
        case Op::Add: z = x + y; break;
        case Op::Sub: z = x - y; break;
        case Op::Mul: z = x * y; break;
        case Op::Div: z = x / y; break;
        default: assert(false);
    }
    Node n{op};
    n.a = a.idx;
    n.b = b.idx;
    n.out = new_var(z);
    nodes_.push_back(n);
    return {this, n.out};
}

TVar Tape::add(TVar a, TVar b) { return binary(Op::Add, a, b); }
TVar Tape::sub(TVar a, TVar b) { return binary(Op::Sub, a, b); }
TVar Tape::mul(TVar a, TVar b) { return binary(Op::Mul, a, b); }
TVar Tape::div(TVar a, TVar b) { return binary(Op::Div, a, b); }
TVar Tape::neg(TVar a) { return unary(Op::Neg, a); }
TVar Tape::sqrt(TVar a) { return unary(Op::Sqrt, a); }
TVar Tape::tanh(TVar a) { return unary(Op::Tanh, a); }
TVar Tape::mul_const(TVar a, double c) { return unary(Op::MulConst, a, c); }
TVar Tape::add_const(TVar a, double c) { return unary(Op::AddConst, a, c); }
TVar Tape::clamp(TVar a, double lo, double hi) { return unary(Op::Clamp, a, lo, hi); }
TVar Tape::wrap_2pi(TVar a) { return unary(Op::Wrap2Pi, a); }
TVar Tape::principal_angle(TVar a) { return unary(Op::PrincipalAngle, a); }

void Tape::affine(int param_off, int dim_in, int dim_out, const TVar* in, TVar* out) {
    Node n{Op::Affine};
    n.a = static_cast<std::int32_t>(pool_.size());
    n.dim_in = dim_in;
    n.dim_out = dim_out;
    n.param_off = param_off;
    for (int i = 0; i < dim_in; ++i) {
        assert(in[i].tape == this);
        pool_.push_back(in[i].idx);
    }
    const double* w = params_.data() + param_off;
    const double* bias = w + dim_in * dim_out;
    const std::int32_t first = static_cast<std::int32_t>(vals_.size());
    for (int j = 0; j < dim_out; ++j) {
        double acc = bias[j];
        const double* wj = w + j * dim_in;
        const std::int32_t* ix = pool_.data() + n.a;
        for (int i = 0; i < dim_in; ++i) acc += wj[i] * vals_[static_cast<std::size_t>(ix[i])];
        vals_.push_back(acc);
    }
    n.out = first;
    nodes_.push_back(n);
    for (int j = 0; j < dim_out; ++j) out[j] = {this, first + j};
}

void Tape::vtanh(TVar first, int dim, TVar* out) {
    assert(first.tape == this);
    Node n{Op::VTanh};
    n.a = first.idx;
    n.dim_in = dim;
    n.dim_out = dim;
    const std::int32_t first_out = static_cast<std::int32_t>(vals_.size());
    for (int i = 0; i < dim; ++i)
        vals_.push_back(std::tanh(vals_[static_cast<std::size_t>(first.idx + i)]));
    n.out = first_out;
    nodes_.push_back(n);
    for (int i = 0; i < dim; ++i) out[i] = {this, first_out + i};
}

void Tape::mlp(const MlpSpec& spec, int param_off, const TVar* in, TVar* out) {
    TVar buf_a[kMaxLayerWidth], buf_b[kMaxLayerWidth];
    const TVar* cur = in;
    const int n_layers = layer_count(spec);
    for (int l = 0; l < n_layers; ++l) {
        const LayerView v = layer_view(spec, l);
        assert(v.out <= kMaxLayerWidth);
        TVar* dst = l == n_layers - 1 ? out : (l % 2 == 0 ? buf_a : buf_b);
        affine(param_off + v.w_off, v.in, v.out, cur, dst);
        if (l != n_layers - 1) {
            vtanh(dst[0], v.out, dst);  // affine outputs are contiguous
            cur = dst;
        }
    }
}

void Tape::backward(TVar seed, double weight) {
    assert(seed.tape == this);
    adj_.assign(vals_.size(), 0.0);
    adj_[static_cast<std::size_t>(seed.idx)] = weight;

    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        const Node& n = *it;
        switch (n.op) {
            case Op::Const:
                break;
            case Op::Add: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                adj_[static_cast<std::size_t>(n.a)] += g;
                adj_[static_cast<std::size_t>(n.b)] += g;
                break;
            }
            case Op::Sub: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                adj_[static_cast<std::size_t>(n.a)] += g;
                adj_[static_cast<std::size_t>(n.b)] -= g;
                break;
            }
            case Op::Mul: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                adj_[static_cast<std::size_t>(n.a)] += g * vals_[static_cast<std::size_t>(n.b)];
                adj_[static_cast<std::size_t>(n.b)] += g * vals_[static_cast<std::size_t>(n.a)];
                break;
            }
            case Op::Div: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                const double denom = vals_[static_cast<std::size_t>(n.b)];
                adj_[static_cast<std::size_t>(n.a)] += g / denom;
                adj_[static_cast<std::size_t>(n.b)] -=
                    g * vals_[static_cast<std::size_t>(n.out)] / denom;
                break;
            }
            case Op::Neg:
                adj_[static_cast<std::size_t>(n.a)] -= adj_[static_cast<std::size_t>(n.out)];
                break;
            case Op::Sqrt: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                adj_[static_cast<std::size_t>(n.a)] +=
                    g * 0.5 / vals_[static_cast<std::size_t>(n.out)];
                break;
            }
            case Op::Tanh: {
                const double g = adj_[static_cast<std::size_t>(n.out)];
                const double y = vals_[static_cast<std::size_t>(n.out)];
                adj_[static_cast<std::size_t>(n.a)] += g * (1.0 - y * y);
                break;
            }
            case Op::MulConst:
                adj_[static_cast<std::size_t>(n.a)] +=
                    adj_[static_cast<std::size_t>(n.out)] * n.c0;
                break;
            case Op::AddConst:
            case Op::Wrap2Pi:
            case Op::PrincipalAngle:
                adj_[static_cast<std::size_t>(n.a)] += adj_[static_cast<std::size_t>(n.out)];
                break;
            case Op::Clamp: {
                const double x = vals_[static_cast<std::size_t>(n.a)];
                if (x >= n.c0 && x <= n.c1)
                    adj_[static_cast<std::size_t>(n.a)] += adj_[static_cast<std::size_t>(n.out)];
                break;
            }
            case Op::Affine: {
                const double* w = params_.data() + n.param_off;
                const int din = n.dim_in, dout = n.dim_out;
                double* gw = pgrad_.data() + n.param_off;
                double* gb = gw + din * dout;
                const std::int32_t* ix = pool_.data() + n.a;
                for (int j = 0; j < dout; ++j) {
                    const double g = adj_[static_cast<std::size_t>(n.out + j)];
                    if (g == 0.0) continue;
                    const double* wj = w + j * din;
                    double* gwj = gw + j * din;
                    for (int i = 0; i < din; ++i) {
                        const std::size_t xi = static_cast<std::size_t>(ix[i]);
                        gwj[i] += g * vals_[xi];
                        adj_[xi] += g * wj[i];
                    }
                    gb[j] += g;
                }
                break;
            }
            case Op::VTanh: {
                for (int i = 0; i < n.dim_in; ++i) {
                    const double g = adj_[static_cast<std::size_t>(n.out + i)];
                    const double y = vals_[static_cast<std::size_t>(n.out + i)];
                    adj_[static_cast<std::size_t>(n.a + i)] += g * (1.0 - y * y);
                }
                break;
            }
        }
    }
}

void Tape::zero_param_grad() { pgrad_.assign(pgrad_.size(), 0.0); }

}  // namespace symflow
