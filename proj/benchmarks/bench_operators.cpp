#include "ssnmg/operators.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace ssnmg;

namespace {

std::shared_ptr<const PoissonOperator> make_k(int dim, int n0, int levels) {
    return std::make_shared<const PoissonOperator>(std::make_shared<const MeshHierarchy>(dim, n0, levels));
}

// Fine level is n0 * 2; state(0) picks n0.
void BM_PoissonSolve2D(benchmark::State& state) {
    const auto k = make_k(2, static_cast<int>(state.range(0)), 2);
    const FeVector u{1, Vector::Ones(k->hierarchy().level(1).num_interior())};
    for (auto _ : state) benchmark::DoNotOptimize(k->apply_K(u));
    state.SetLabel("n=" + std::to_string(2 * state.range(0)));
}
BENCHMARK(BM_PoissonSolve2D)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GApply2D(benchmark::State& state) {
    const auto k = make_k(2, static_cast<int>(state.range(0)), 2);
    const MeshHierarchy& h = k->hierarchy();
    const InactiveSet set = inactive_from_region(1, {{0.25, 0.25}, {0.75, 0.75}}, h);
    const GOperator g(k, set, 1e-4);
    const Vector u = Vector::Ones(set.size());
    for (auto _ : state) benchmark::DoNotOptimize(g.apply(u));
    state.SetLabel("inactive=" + std::to_string(set.size()));
}
BENCHMARK(BM_GApply2D)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TwoGridS2D(benchmark::State& state) {
    const auto k = make_k(2, static_cast<int>(state.range(0)), 2);
    const MeshHierarchy& h = k->hierarchy();
    const InactiveSet set = inactive_from_region(1, {{0.25, 0.25}, {0.75, 0.75}}, h);
    const TwoGridPreconditioner tg(k, set, 1e-4);
    const Vector r = Vector::Ones(set.size());
    for (auto _ : state) benchmark::DoNotOptimize(tg.apply_S(r));
    state.SetLabel("coarse=" + std::to_string(tg.coarse_set().size()));
}
BENCHMARK(BM_TwoGridS2D)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NewtonMultigrid1D(benchmark::State& state) {
    const auto k = make_k(1, 16, static_cast<int>(state.range(0)));
    const int fine = static_cast<int>(state.range(0)) - 1;
    const InactiveSet set = inactive_from_region(fine, {{0.125, 0.0}, {0.75, 1.0}}, k->hierarchy());
    const MultigridPreconditioner z(k, set, 1.0, 0, MultigridVariant::newton, {CoarseSolveOptions::Mode::exact});
    const Vector r = Vector::Ones(set.size());
    for (auto _ : state) benchmark::DoNotOptimize(z.apply(r));
}
BENCHMARK(BM_NewtonMultigrid1D)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
