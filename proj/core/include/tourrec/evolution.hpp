#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tourrec/apriori.hpp"
#include "tourrec/bitset.hpp"
#include "tourrec/rng.hpp"

namespace tourrec {

/// Genetic search over itemsets encoded as item bitstrings.
struct EvoParams {
  std::size_t population = 64;
  std::size_t generations = 50;
  double mutation_rate = 0.005;  // per bit
  double crossover_rate = 0.8;   // per parent pair; uniform crossover
  std::uint64_t seed = 0;
  std::size_t runs = 30;
  /// Probability each bit is set in the initial population; 0 picks
  /// min(0.5, 2/n).
  double init_density = 0.0;
  /// Fitness multiplier for itemsets below the support threshold.
  double penalty = 0.1;

  void validate() const;
};

/// Item tidsets (one bitset over transactions per item) for fast support
/// evaluation of arbitrary itemsets.
class ColumnIndex {
 public:
  explicit ColumnIndex(const TransactionMatrix& t);
  std::uint64_t count(const Bitset& items) const;
  std::size_t items() const noexcept { return columns_.size(); }
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t rows_ = 0;
  std::vector<Bitset> columns_;
};

class GeneticSearch {
 public:
  GeneticSearch(const ColumnIndex& index, double min_supp, const EvoParams& params,
                std::uint64_t seed);

  /// Random initial population (also done by the constructor).
  void randomize();
  void set_population(std::vector<Bitset> population);
  void step();
  void run(std::size_t generations);

  const std::vector<Bitset>& population() const noexcept { return population_; }
  double fitness(const Bitset& individual);
  double best_fitness() const noexcept { return best_fitness_; }
  std::size_t evaluations() const noexcept { return cache_.size(); }

  /// Every frequent itemset seen so far, plus all of their subsets.
  std::vector<FrequentSet> frequent_closure() const;

 private:
  std::size_t tournament();

  const ColumnIndex& index_;
  EvoParams params_;
  std::uint64_t min_count_;
  Rng rng_;
  std::vector<Bitset> population_;
  std::vector<double> scores_;
  std::unordered_map<Bitset, std::uint64_t, BitsetHash> cache_;
  std::unordered_set<Bitset, BitsetHash> archive_;
  double best_fitness_ = 0.0;
};

struct RunStats {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double rule_count = 0;
  double frequent_count = 0;
  double evaluations = 0;
  double best_fitness = 0;
  double wall_time_s = 0;
};

struct EvoResult {
  std::vector<AssociationRule> rules;  // union over runs, canonical order
  std::vector<RunStats> runs;
};

/// `params.runs` independent searches with seeds seed, seed+1, ...
EvoResult evolve_rules(const TransactionMatrix& t, double min_supp, double min_conf,
                       const EvoParams& params);

struct MetricSummary {
  std::string metric;
  double mean = 0;
  double stddev = 0;  // sample (n-1); 0 for a single run
  double min = 0;
  double max = 0;
};

MetricSummary summarize(std::string metric, std::span<const double> values);

/// Summary per metric, in the order: rule_count, frequent_count,
/// evaluations, best_fitness, wall_time_s.
std::vector<MetricSummary> aggregate_runs(std::span<const RunStats> runs);

}  // namespace tourrec
