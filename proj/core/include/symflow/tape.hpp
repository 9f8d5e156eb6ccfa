#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symflow/net.hpp"

namespace symflow {

class Tape;

/// Handle to a scalar value recorded on a tape. Trivially copyable; arithmetic
/// operators push new nodes and evaluate eagerly.
struct TVar {
    Tape* tape = nullptr;
    std::int32_t idx = -1;
};

/// Reverse-mode tape over a fixed op set: scalar arithmetic, sqrt/tanh, angle
/// wrapping, clamping, and two vector ops (affine layer, elementwise tanh)
/// that carry the MLP bulk. Parameters are not tape variables; affine nodes
/// index into a bound parameter vector and their reverse sweep accumulates
/// directly into param_grad().
class Tape {
public:
    explicit Tape(std::span<const double> params);

    /// Points the tape at a (possibly updated) parameter vector of the same
    /// length. Existing nodes become stale; call reset() first.
    void rebind(std::span<const double> params);

    /// Drops all recorded nodes and values, keeping capacity and the
    /// accumulated parameter gradient.
    void reset();

    std::size_t size() const { return vals_.size(); }
    double value(TVar v) const { return vals_[static_cast<std::size_t>(v.idx)]; }
    /// Adjoint of a variable after backward(); zero before.
    double adjoint(TVar v) const {
        return v.idx < static_cast<std::int32_t>(adj_.size())
                   ? adj_[static_cast<std::size_t>(v.idx)]
                   : 0.0;
    }
    int clamp_events() const { return clamp_events_; }

    TVar constant(double v);
    TVar input(double v) { return constant(v); }

    TVar add(TVar a, TVar b);
    TVar sub(TVar a, TVar b);
    TVar mul(TVar a, TVar b);
    TVar div(TVar a, TVar b);
    TVar neg(TVar a);
    TVar sqrt(TVar a);
    TVar tanh(TVar a);
    TVar mul_const(TVar a, double c);
    TVar add_const(TVar a, double c);
    /// value = clamp(x, lo, hi); gradient passes only when unclamped.
    TVar clamp(TVar a, double lo, double hi);
    /// value wrapped to [0, 2*pi); unit gradient.
    TVar wrap_2pi(TVar a);
    /// principal value in (-pi, pi]; unit gradient.
    TVar principal_angle(TVar a);

    /// Affine layer y = W x + b with W (dim_out x dim_in, row-major) and b
    /// taken from the bound parameters at param_off. Inputs may be any tape
    /// variables; outputs are dim_out fresh contiguous variables.
    void affine(int param_off, int dim_in, int dim_out, const TVar* in, TVar* out);

    /// Elementwise tanh over dim contiguous variables starting at first.
    void vtanh(TVar first, int dim, TVar* out);

    /// Feed-forward network evaluation on the tape; spec's parameters start
    /// at param_off in the bound vector.
    void mlp(const MlpSpec& spec, int param_off, const TVar* in, TVar* out);

    /// Reverse sweep from seed with d(loss)/d(seed) = weight. Adds into
    /// param_grad(). May be called once per recorded program.
    void backward(TVar seed, double weight = 1.0);

    std::span<const double> param_grad() const { return pgrad_; }
    void zero_param_grad();

private:
    enum class Op : std::uint8_t {
        Const,
        Add,
        Sub,
        Mul,
        Div,
        Neg,
        Sqrt,
        Tanh,
        MulConst,
        AddConst,
        Clamp,
        Wrap2Pi,
        PrincipalAngle,
        Affine,
        VTanh,
    };

    struct Node {
        Op op;
        std::int32_t a = -1;  // input var (or pool offset for Affine)
        std::int32_t b = -1;
        std::int32_t out = -1;
        std::int32_t dim_in = 0;
        std::int32_t dim_out = 0;
        std::int32_t param_off = -1;
        double c0 = 0.0;
        double c1 = 0.0;
    };

    std::int32_t new_var(double value);
    TVar unary(Op op, TVar a, double c0 = 0.0, double c1 = 0.0);
    TVar binary(Op op, TVar a, TVar b);

    std::vector<Node> nodes_;
    std::vector<double> vals_;
    std::vector<double> adj_;
    std::vector<std::int32_t> pool_;
    std::span<const double> params_;
    std::vector<double> pgrad_;
    int clamp_events_ = 0;
};

// ---- operator sugar --------------------------------------------------------

inline TVar operator+(TVar a, TVar b) { return a.tape->add(a, b); }
inline TVar operator-(TVar a, TVar b) { return a.tape->sub(a, b); }
inline TVar operator*(TVar a, TVar b) { return a.tape->mul(a, b); }
inline TVar operator/(TVar a, TVar b) { return a.tape->div(a, b); }
inline TVar operator-(TVar a) { return a.tape->neg(a); }

inline TVar operator+(TVar a, double c) { return a.tape->add_const(a, c); }
inline TVar operator+(double c, TVar a) { return a.tape->add_const(a, c); }
inline TVar operator-(TVar a, double c) { return a.tape->add_const(a, -c); }
inline TVar operator-(double c, TVar a) { return a.tape->add_const(a.tape->neg(a), c); }
inline TVar operator*(TVar a, double c) { return a.tape->mul_const(a, c); }
inline TVar operator*(double c, TVar a) { return a.tape->mul_const(a, c); }
inline TVar operator/(TVar a, double c) { return a.tape->mul_const(a, 1.0 / c); }

inline TVar sqrt(TVar a) { return a.tape->sqrt(a); }
inline TVar tanh(TVar a) { return a.tape->tanh(a); }

}  // namespace symflow
