#include <benchmark/benchmark.h>

#include "tourrec/clustering.hpp"
#include "tourrec/data_model.hpp"
#include "tourrec/evolution.hpp"
#include "tourrec/hybrid.hpp"
#include "tourrec/planner.hpp"
#include "tourrec/rng.hpp"

using namespace tourrec;

namespace {

struct Fixture {
  PlaceCatalog catalog;
  TransactionMatrix matrix;
  ClusterModel model;
};

// Default 5000 x 232 dataset, built once.
const Fixture& fixture() {
  static const Fixture f = [] {
    auto catalog = load_places(TOURREC_SOURCE_DIR "/data/iraq_places.csv");
    auto data = generate_dataset(catalog, 5000, 10000, stage_seed(42, "gen"));
    auto matrix = build_matrix(catalog, data.visitors, data.events);
    auto model = kmeans(featurize(catalog), 10, stage_seed(42, "cluster"));
    return Fixture{std::move(catalog), std::move(matrix), std::move(model)};
  }();
  return f;
}

double threshold(const benchmark::State& state) {
  return static_cast<double>(state.range(0)) / 100.0;
}

void BM_MineBaseline(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(mine_baseline(f.matrix, threshold(state), 0.5));
}

void BM_MineHybrid(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(mine_hybrid(f.matrix, f.model, threshold(state), 0.5));
}

void BM_KMeans(benchmark::State& state) {
  auto points = featurize(fixture().catalog);
  auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, k, 42));
}

void BM_EvolveRules(benchmark::State& state) {
  EvoParams p;
  p.runs = 1;
  p.seed = 42;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_rules(fixture().matrix, 0.02, 0.5, p));
}

void BM_Recommend(benchmark::State& state) {
  const auto& f = fixture();
  auto rules = mine_hybrid(f.matrix, f.model, 0.02, 0.5);
  auto ids = f.matrix.place_ids();
  std::size_t row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(recommend(f.matrix.row(row), rules, f.model, ids, 10, 0.7));
    row = (row + 1) % f.matrix.rows();
  }
}

void BM_PlanTrip(benchmark::State& state) {
  const auto& f = fixture();
  auto rules = mine_hybrid(f.matrix, f.model, 0.02, 0.5);
  auto recs = recommend(f.matrix.row(0), rules, f.model, f.matrix.place_ids(), 12, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(plan_trip(recs, f.catalog, {33.3152, 44.3661}, 3, 4));
}

}  // namespace

BENCHMARK(BM_MineBaseline)->DenseRange(2, 10, 2);
BENCHMARK(BM_MineHybrid)->DenseRange(2, 10, 2);
BENCHMARK(BM_KMeans)->Arg(5)->Arg(10)->Arg(20);
BENCHMARK(BM_EvolveRules);
BENCHMARK(BM_Recommend);
BENCHMARK(BM_PlanTrip);
BENCHMARK_MAIN();
