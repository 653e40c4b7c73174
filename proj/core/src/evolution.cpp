#include "tourrec/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "tourrec/error.hpp"

namespace tourrec {

void EvoParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (population < 2) throw Error(ErrorCode::InvalidArgument, "population must be >= 2");
  if (runs < 1) throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
  if (!prob(mutation_rate) || !prob(crossover_rate) || !prob(init_density) || !prob(penalty))
    throw Error(ErrorCode::InvalidArgument, "evolution probabilities must be in [0,1]");
}

ColumnIndex::ColumnIndex(const TransactionMatrix& t)
    : rows_(t.rows()), columns_(t.items(), Bitset(t.rows())) {
  for (std::size_t r = 0; r < t.rows(); ++r) t.row(r).for_each([&](std::size_t i) { columns_[i].set(r); });
}

std::uint64_t ColumnIndex::count(const Bitset& items) const {
  std::size_t first = items.size();
  items.for_each([&](std::size_t i) {
    if (first == items.size()) first = i;
  });
  if (first == items.size()) return rows_;
  Bitset acc = columns_[first];
  items.for_each([&](std::size_t i) {
    if (i != first) acc &= columns_[i];
  });
  return acc.count();
}

// ---------------------------------------------------------------------------

GeneticSearch::GeneticSearch(const ColumnIndex& index, double min_supp, const EvoParams& params,
                             std::uint64_t seed)
    : index_(index), params_(params), rng_(seed) {
  params_.validate();
  if (!(min_supp > 0.0 && min_supp <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "min support must be in (0,1]");
  min_count_ = min_count_for(min_supp, index.rows());
  randomize();
}

void GeneticSearch::randomize() {
  const std::size_t n = index_.items();
  double density = params_.init_density > 0.0
                       ? params_.init_density
                       : std::min(0.5, 2.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  population_.assign(params_.population, Bitset(n));
  for (auto& ind : population_) {
    for (std::size_t i = 0; i < n; ++i)
      if (rng_.chance(density)) ind.set(i);
    if (ind.none()) ind.set(static_cast<std::size_t>(rng_.below(n)));
  }
  scores_.clear();
}

void GeneticSearch::set_population(std::vector<Bitset> population) {
  if (population.size() < 2) throw Error(ErrorCode::InvalidArgument, "population must be >= 2");
  for (const auto& ind : population)
    if (ind.size() != index_.items())
      throw Error(ErrorCode::DimensionMismatch, "individual length differs from item count");
  population_ = std::move(population);
  scores_.clear();
}

double GeneticSearch::fitness(const Bitset& individual) {
  if (individual.none()) return 0.0;
  auto it = cache_.find(individual);
  if (it == cache_.end()) it = cache_.emplace(individual, index_.count(individual)).first;
  auto count = it->second;
  double supp = static_cast<double>(count) / static_cast<double>(index_.rows());
  double f = supp;
  if (count >= min_count_ && count > 0)
    archive_.insert(individual);
  else
    f = supp * params_.penalty;
  best_fitness_ = std::max(best_fitness_, f);
  return f;
}

std::size_t GeneticSearch::tournament() {
  auto a = static_cast<std::size_t>(rng_.below(population_.size()));
  auto b = static_cast<std::size_t>(rng_.below(population_.size()));
  return scores_[b] > scores_[a] ? b : a;
}

void GeneticSearch::step() {
  scores_.resize(population_.size());
  for (std::size_t i = 0; i < population_.size(); ++i) scores_[i] = fitness(population_[i]);

  const std::size_t n = index_.items();
  std::vector<Bitset> next;
  next.reserve(population_.size());
  while (next.size() < population_.size()) {
    Bitset c1 = population_[tournament()];
    Bitset c2 = population_[tournament()];
    if (params_.crossover_rate > 0.0 && rng_.chance(params_.crossover_rate)) {
      for (std::size_t i = 0; i < n; ++i) {
        if (c1.test(i) != c2.test(i) && rng_.chance(0.5)) {
          c1.flip(i);
          c2.flip(i);
        }
      }
    }
    if (params_.mutation_rate > 0.0) {
      for (auto* c : {&c1, &c2})
        for (std::size_t i = 0; i < n; ++i)
          if (rng_.chance(params_.mutation_rate)) c->flip(i);
    }
    next.push_back(std::move(c1));
    if (next.size() < population_.size()) next.push_back(std::move(c2));
  }
  population_ = std::move(next);
  for (const auto& ind : population_) fitness(ind);
}

void GeneticSearch::run(std::size_t generations) {
  for (const auto& ind : population_) fitness(ind);
  for (std::size_t g = 0; g < generations; ++g) step();
}

std::vector<FrequentSet> GeneticSearch::frequent_closure() const {
  std::set<Itemset> closed;
  std::vector<ItemId> items;
  for (const auto& bits : archive_) {
    items.clear();
    bits.for_each([&](std::size_t i) { items.push_back(static_cast<ItemId>(i)); });
    // Frequent itemsets on real data are short; cap the subset walk anyway.
    if (items.size() > 20) continue;
    const std::uint32_t limit = 1u << items.size();
    for (std::uint32_t m = 1; m < limit; ++m) {
      std::vector<ItemId> sub;
      for (std::size_t b = 0; b < items.size(); ++b)
        if (m & (1u << b)) sub.push_back(items[b]);
      closed.insert(Itemset(std::move(sub)));
    }
  }
  std::vector<FrequentSet> out;
  out.reserve(closed.size());
  for (const auto& s : closed) {
    auto count = index_.count(s.mask(index_.items()));
    out.push_back({s, {count, index_.rows()}});
  }
  return out;
}

// ---------------------------------------------------------------------------

EvoResult evolve_rules(const TransactionMatrix& t, double min_supp, double min_conf,
                       const EvoParams& params) {
  params.validate();
  ColumnIndex index(t);
  EvoResult out;
  std::set<std::pair<Itemset, Itemset>> seen;
  for (std::size_t run = 0; run < params.runs; ++run) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = params.seed + run;
    GeneticSearch search(index, min_supp, params, seed);
    search.run(params.generations);
    auto frequents = search.frequent_closure();
    auto rules = derive_rules(frequents, t, min_conf);

    RunStats stats;
    stats.run = run;
    stats.seed = seed;
    stats.rule_count = static_cast<double>(rules.size());
    stats.frequent_count = static_cast<double>(frequents.size());
    stats.evaluations = static_cast<double>(search.evaluations());
    stats.best_fitness = search.best_fitness();
    for (auto& r : rules)
      if (seen.emplace(r.antecedent, r.consequent).second) out.rules.push_back(std::move(r));
    stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.runs.push_back(stats);
  }
  std::sort(out.rules.begin(), out.rules.end(), rule_less);
  return out;
}

MetricSummary summarize(std::string metric, std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyRuns, "no runs to aggregate");
  MetricSummary s;
  s.metric = std::move(metric);
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<MetricSummary> aggregate_runs(std::span<const RunStats> runs) {
  if (runs.empty()) throw Error(ErrorCode::EmptyRuns, "no runs to aggregate");
  auto column = [&](double RunStats::*field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*field);
    return v;
  };
  return {
      summarize("rule_count", column(&RunStats::rule_count)),
      summarize("frequent_count", column(&RunStats::frequent_count)),
      summarize("evaluations", column(&RunStats::evaluations)),
      summarize("best_fitness", column(&RunStats::best_fitness)),
      summarize("wall_time_s", column(&RunStats::wall_time_s)),
  };
}

}  // namespace tourrec
