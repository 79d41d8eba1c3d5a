#include <benchmark/benchmark.h>

#include <vector>

#include "spikan/bspline.hpp"
#include "spikan/full_model.hpp"
#include "spikan/kanet.hpp"
#include "spikan/loss.hpp"
#include "spikan/physics.hpp"
#include "spikan/sep_model.hpp"

using namespace spikan;

namespace {

void BM_BasisJet(benchmark::State& state) {
  const SplineSpec spec(3, static_cast<int>(state.range(0)));
  double x = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis_jet(spec, x));
    x = x > 0.9 ? -0.9 : x + 1e-3;
  }
}
BENCHMARK(BM_BasisJet)->Arg(3)->Arg(5);

void BM_ForwardJet(benchmark::State& state) {
  Rng rng(1);
  const KanNetwork net = KanNetwork::random({1, 5, 5, 10}, SplineSpec(3, 5), rng);
  const std::vector<double> x{0.3};
  for (auto _ : state) benchmark::DoNotOptimize(forward_jet(net, x, 0));
}
BENCHMARK(BM_ForwardJet);

void BM_SeparableLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_problem("helmholtz2d");
  Rng rng(2);
  auto m = SeparableModel::random({1, 3, 3, 5}, SplineSpec(3, 3), 5, 1, p->axis_maps(), p->axis_names(), rng);
  const SeparableLoss loss(*p, make_collocation(*p, std::vector<std::size_t>{n, n}));
  const LossWeights w{};
  for (auto _ : state) benchmark::DoNotOptimize(loss(m, w, true));
}
BENCHMARK(BM_SeparableLoss)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DenseLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_problem("helmholtz2d");
  Rng rng(3);
  auto m = DenseModel::random({2, 6, 6, 1}, SplineSpec(3, 3), p->axis_maps(), p->axis_names(), rng);
  const DenseLoss loss(*p, make_collocation(*p, std::vector<std::size_t>{n, n}));
  const LossWeights w{};
  for (auto _ : state) benchmark::DoNotOptimize(loss(m, w, true));
}
BENCHMARK(BM_DenseLoss)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
