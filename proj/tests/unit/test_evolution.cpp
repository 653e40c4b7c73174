#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tourrec/error.hpp"
#include "tourrec/evolution.hpp"

using namespace tourrec;
using oracle::code_of;

namespace {

EvoParams exhaustive(std::uint64_t seed) {
  EvoParams p;
  p.population = 256;
  p.generations = 40;
  p.runs = 4;
  p.init_density = 0.5;
  p.mutation_rate = 0.05;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  EvoParams p;
  CHECK_NOTHROW(p.validate());
  p.population = 1;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  p = {};
  p.mutation_rate = 1.5;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  p = {};
  p.runs = 0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("column index counts agree with the row scan") {
  Rng rng(4);
  auto t = oracle::random_matrix(rng, 9, 70, 0.4);
  ColumnIndex index(t);
  for (std::uint32_t mask = 0; mask < (1u << 9); mask += 7) {
    Bitset b(9);
    for (auto i : oracle::items_of(mask)) b.set(i);
    CHECK(index.count(b) == oracle::count(t, mask));
  }
}

TEST_CASE("fitness applies the penalty below the threshold") {
  auto t = oracle::four_rows();
  ColumnIndex index(t);
  EvoParams p;
  p.population = 4;
  GeneticSearch gs(index, 0.5, p, 1);
  Bitset ab(3), bc(3);
  ab.set(0);
  ab.set(1);
  bc.set(1);
  bc.set(2);
  CHECK(gs.fitness(ab) == 0.5);
  CHECK(gs.fitness(bc) == doctest::Approx(0.025));
  CHECK(gs.fitness(Bitset(3)) == 0.0);
  auto closure = gs.frequent_closure();
  REQUIRE(closure.size() == 3);  // {A}, {B}, {A,B}
  CHECK(closure[2].itemset == Itemset{0, 1});
}

TEST_CASE("no variation operators keep the population fixed") {
  Rng rng(2);
  auto t = oracle::random_matrix(rng, 6, 20, 0.5);
  ColumnIndex index(t);
  EvoParams p;
  p.population = 8;
  p.mutation_rate = 0.0;
  p.crossover_rate = 0.0;
  GeneticSearch gs(index, 0.2, p, 9);
  Bitset one(6);
  one.set(1);
  one.set(4);
  gs.set_population(std::vector<Bitset>(8, one));
  gs.run(10);
  for (const auto& ind : gs.population()) CHECK(ind == one);
}

TEST_CASE("evolved rules re-verify against the matrix") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = oracle::random_matrix(rng, 12, 50, 0.35);
    EvoParams p;
    p.population = 32;
    p.generations = 15;
    p.runs = 3;
    p.seed = 100 + static_cast<std::uint64_t>(trial);
    auto res = evolve_rules(t, 0.1, 0.4, p);
    CHECK(res.runs.size() == 3);
    auto need = min_count_for(0.1, t.rows());
    for (const auto& r : res.rules) {
      std::uint32_t x = 0;
      for (auto i : r.antecedent) x |= 1u << i;
      auto xy = x | (1u << r.consequent[0]);
      CHECK(oracle::count(t, xy) == r.union_count);
      CHECK(r.union_count >= need);
      CHECK(static_cast<double>(r.union_count) + 1e-9 >= 0.4 * static_cast<double>(oracle::count(t, x)));
    }
  }
}

TEST_CASE("exhaustive budget recovers the exact rule set") {
  Rng rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    auto n = static_cast<std::size_t>(rng.between(3, 8));
    auto t = oracle::random_matrix(rng, n, 40, 0.5);
    auto res = evolve_rules(t, 0.15, 0.5, exhaustive(7 + static_cast<std::uint64_t>(trial)));
    CHECK(oracle::plain(res.rules) == oracle::rules(t, 0.15, 0.5));
  }
}

TEST_CASE("same seed gives identical results") {
  Rng rng(12);
  auto t = oracle::random_matrix(rng, 10, 40, 0.4);
  EvoParams p;
  p.runs = 1;
  p.seed = 77;
  auto a = evolve_rules(t, 0.1, 0.3, p);
  auto b = evolve_rules(t, 0.1, 0.3, p);
  CHECK(a.rules == b.rules);
  CHECK(a.runs[0].evaluations == b.runs[0].evaluations);
  CHECK(a.runs[0].best_fitness == b.runs[0].best_fitness);
  CHECK(a.runs[0].seed == 77);
}

TEST_CASE("summaries use the sample standard deviation") {
  std::vector<double> two{2, 4};
  auto s = summarize("time", two);
  CHECK(s.mean == 3.0);
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.min == 2.0);
  CHECK(s.max == 4.0);
  std::vector<double> one{5};
  auto single = summarize("x", one);
  CHECK(single.mean == 5.0);
  CHECK(single.stddev == 0.0);
  CHECK(code_of([] { summarize("x", std::vector<double>{}); }) == ErrorCode::EmptyRuns);
  CHECK(code_of([] { aggregate_runs(std::vector<RunStats>{}); }) == ErrorCode::EmptyRuns);
}

TEST_CASE("aggregate_runs reproduces a hand-computed table") {
  // rule_count = run % 5, so the 30 values are 0..4 six times each:
  // mean 2, sample variance 60 / 29.
  std::vector<RunStats> runs(30);
  for (std::size_t i = 0; i < 30; ++i) {
    runs[i].run = i;
    runs[i].rule_count = static_cast<double>(i % 5);
    runs[i].wall_time_s = 0.5;
  }
  auto out = aggregate_runs(runs);
  REQUIRE(out.size() == 5);
  CHECK(out[0].metric == "rule_count");
  CHECK(out[0].mean == 2.0);
  CHECK(out[0].stddev == doctest::Approx(std::sqrt(60.0 / 29.0)));
  CHECK(out[0].min == 0.0);
  CHECK(out[0].max == 4.0);
  CHECK(out[4].metric == "wall_time_s");
  CHECK(out[4].mean == 0.5);
  CHECK(out[4].stddev == 0.0);
}
