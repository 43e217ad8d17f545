#include <benchmark/benchmark.h>

#include "faceval/affine.hpp"
#include "faceval/evaluator.hpp"
#include "faceval/mask.hpp"
#include "faceval/oracle.hpp"
#include "support.hpp"

using namespace faceval;
using namespace faceval::testing;

static void BM_FitAffine(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const LandmarkSet l = random_landmarks(rng, n);
  const LandmarkSet h = noisy_affine_copy(rng, l, 2.0);
  const WeightVector w = WeightVector::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(fit_affine(l, h, w));
}
BENCHMARK(BM_FitAffine)->Arg(3)->Arg(68)->Arg(1000);

static void BM_FitAffineIterative(benchmark::State& state) {
  Rng rng(2);
  const LandmarkSet l = random_landmarks(rng, 68);
  const LandmarkSet h = noisy_affine_copy(rng, l, 2.0);
  const WeightVector w = WeightVector::uniform(68);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::fit_affine_iterative(l, h, w));
}
BENCHMARK(BM_FitAffineIterative);

static void BM_NormalizeMask(benchmark::State& state) {
  Rng rng(3);
  const int side = static_cast<int>(state.range(0));
  ScalarField raw(side, side, std::vector<float>(static_cast<std::size_t>(side) * side));
  for (float& v : raw.values) v = static_cast<float>(uniform(rng, 0.0, 3.0));
  for (auto _ : state) benchmark::DoNotOptimize(normalize_mask(raw));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_NormalizeMask)->Arg(64)->Arg(512);

static void BM_Sobel(benchmark::State& state) {
  Rng rng(4);
  const int side = static_cast<int>(state.range(0));
  Image img = Image::constant(3, side, side, 0.0f);
  for (float& v : img.values) v = static_cast<float>(uniform(rng, 0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(sobel_edges(img));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Sobel)->Arg(512);

static void BM_BatchEvaluate(benchmark::State& state) {
  TempDir dir("bench_batch");
  Rng rng(5);
  auto items = parse_pairs_csv(write_batch_fixture(dir.path(), rng, 1000), dir.path());
  for (auto& item : items) {
    item.emb_pred.reset();
    item.emb_gt.reset();
  }
  EvalConfig config;
  config.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(batch_evaluate(items, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(items.size()));
}
BENCHMARK(BM_BatchEvaluate)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
