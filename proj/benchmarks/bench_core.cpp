#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "symflow/grad.hpp"
#include "symflow/invariants.hpp"
#include "symflow/model.hpp"
#include "symflow/net.hpp"
#include "symflow/odeint.hpp"
#include "symflow/train.hpp"

using namespace symflow;

namespace {

FieldSpec rotation_field() {
    FieldSpec f;
    f.dim_state = 2;
    f.eval = [](double, std::span<const double> y, std::span<const double>,
                std::span<double> out) {
        out[0] = -y[1];
        out[1] = y[0];
    };
    return f;
}

Batch radial_batch() {
    const Dataset ds = make_dataset(ExampleId::Radial, 42);
    return Batch{ds.inputs, ds.targets};
}

}  // namespace

static void BM_Rk4Integrate(benchmark::State& state) {
    const FieldSpec f = rotation_field();
    const std::vector<double> p = {1.0, 0.0};
    for (auto _ : state) {
        auto traj = integrate(f, p, 0.0, 1.0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(traj.states.back());
    }
}
BENCHMARK(BM_Rk4Integrate)->Arg(20)->Arg(100);

static void BM_MlpForward(benchmark::State& state) {
    const int width = static_cast<int>(state.range(0));
    const MlpSpec spec{1, 1, {width, width}};
    const ParamVector params = init_params(spec, 1);
    const std::vector<double> x = {1.3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mlp_forward_scalar(spec, params.values, x));
    }
}
BENCHMARK(BM_MlpForward)->Arg(32)->Arg(64);

static void BM_ModelApply(benchmark::State& state) {
    const NodeModel m = make_model(GeometryId::R2Punctured,
                                   state.range(0) == 0 ? ModelKind::Plain : ModelKind::Augmented,
                                   {32, 32}, 7);
    const Vec2 p = {1.0, 0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply(m, p));
    }
}
BENCHMARK(BM_ModelApply)->Arg(0)->Arg(1);

static void BM_GradEpoch(benchmark::State& state) {
    const NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Plain, {32, 32}, 42);
    const Batch batch = radial_batch();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto res = grad_through_flow(m, batch, LossKind::SquaredEuclidean, threads);
        benchmark::DoNotOptimize(res.grad.data());
    }
}
BENCHMARK(BM_GradEpoch)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_InvariantEvaluate(benchmark::State& state) {
    const InvariantSet set = invariant_registry(GeometryId::R2Punctured, 2);
    JetPoint z;
    z.u = {1.0, 2.0};
    z.du = {0.5, -0.3};
    z.ddu = Vec2{0.1, 0.2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(set, z));
    }
}
BENCHMARK(BM_InvariantEvaluate);

static void BM_ApplyInverseAugmented(benchmark::State& state) {
    const NodeModel m = make_model(GeometryId::R2Punctured, ModelKind::Augmented, {32, 32}, 11);
    const Vec2 p = {1.4, -0.2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_inverse(m, p));
    }
}
BENCHMARK(BM_ApplyInverseAugmented)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
