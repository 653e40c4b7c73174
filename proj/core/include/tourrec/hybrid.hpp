#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "tourrec/apriori.hpp"
#include "tourrec/clustering.hpp"

namespace tourrec {

enum class RuleSource : std::uint8_t { Hybrid, Baseline };

std::string_view to_string(RuleSource s) noexcept;

struct RuleRef {
  std::uint32_t cluster = 0;
  std::uint32_t index = 0;

  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

/// Rules grouped by the cluster they were mined in. A baseline rule base has
/// a single pseudo-cluster holding every item.
class RuleBase {
 public:
  RuleBase() = default;
  RuleBase(RuleSource source, std::size_t items,
           std::vector<std::vector<AssociationRule>> per_cluster,
           std::vector<FrequentSet> frequents, MiningStats stats);

  RuleSource source() const noexcept { return source_; }
  std::size_t items() const noexcept { return items_; }
  const std::vector<std::vector<AssociationRule>>& per_cluster() const noexcept {
    return per_cluster_;
  }
  const AssociationRule& rule(RuleRef ref) const {
    return per_cluster_.at(ref.cluster).at(ref.index);
  }
  /// Frequent itemsets of every cluster, canonical order.
  const std::vector<FrequentSet>& frequents() const noexcept { return frequents_; }
  const MiningStats& mining_stats() const noexcept { return stats_; }
  std::size_t rule_count() const noexcept;
  /// Every rule in (cluster, canonical) order.
  std::vector<AssociationRule> all_rules() const;

  struct Entry {
    Bitset antecedent;
    double confidence;
    RuleRef ref;
  };
  /// Rules whose consequent is `item`.
  const std::vector<Entry>& rules_into(ItemId item) const { return by_consequent_.at(item); }

 private:
  RuleSource source_ = RuleSource::Baseline;
  std::size_t items_ = 0;
  std::vector<std::vector<AssociationRule>> per_cluster_;
  std::vector<FrequentSet> frequents_;
  MiningStats stats_;
  std::vector<std::vector<Entry>> by_consequent_;
};

/// Mines each cluster's item columns separately over the same transactions.
/// Candidate and frequent counts are summed per level. Clusters are mined one
/// after another, so candidate_bytes_peak is the largest single-cluster peak.
RuleBase mine_hybrid(const TransactionMatrix& t, const ClusterModel& model, double min_supp,
                     double min_conf);

/// Plain Apriori over all items, wrapped as one pseudo-cluster.
RuleBase mine_baseline(const TransactionMatrix& t, double min_supp, double min_conf);

struct PlaceScore {
  double score = 0.0;
  double rule_score = 0.0;
  double affinity = 0.0;
  std::vector<RuleRef> evidence;
};

/// Scores candidate places for one visitor history:
///   rule_score = max confidence over rules X => place with X in history
///   affinity   = share of history items in the place's cluster
///   score      = alpha * rule_score + (1 - alpha) * affinity
class Scorer {
 public:
  Scorer(const RuleBase& rules, const ClusterModel& model, double alpha);

  PlaceScore score(const Bitset& history, ItemId place) const;
  double alpha() const noexcept { return alpha_; }

 private:
  const RuleBase& rules_;
  const ClusterModel& model_;
  double alpha_;
};

PlaceScore score_place(const Itemset& history, ItemId place, const RuleBase& rules,
                       const ClusterModel& model, double alpha = 0.7);

struct Recommendation {
  PlaceId place_id = 0;
  ItemId item = 0;
  double score = 0.0;
  std::vector<RuleRef> rule_evidence;
  double cluster_affinity = 0.0;
};

/// Scores every unvisited place; sorted by score desc, place id asc; at most
/// top_n entries.
std::vector<Recommendation> recommend(const Bitset& visitor_row, const RuleBase& rules,
                                      const ClusterModel& model,
                                      std::span<const PlaceId> place_ids, std::size_t top_n,
                                      double alpha = 0.7);

/// `visitor_id,rank,place_id,score,rule_count,affinity`
void write_recommendations(std::ostream& out, VisitorId visitor,
                           std::span<const Recommendation> recs);

/// Rule export with a leading cluster column.
void write_rulebase(std::ostream& out, const RuleBase& rules, std::span<const PlaceId> place_ids);
RuleBase read_rulebase(std::istream& in, const TransactionMatrix& t, std::size_t clusters,
                       RuleSource source, std::string_view name = "<stream>");

}  // namespace tourrec
