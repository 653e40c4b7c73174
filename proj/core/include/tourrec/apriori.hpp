#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <string_view>
#include <vector>

#include "tourrec/data_model.hpp"

namespace tourrec {

/// Sorted, duplicate-free set of item ordinals.
class Itemset {
 public:
  Itemset() = default;
  explicit Itemset(std::vector<ItemId> items);
  Itemset(std::initializer_list<ItemId> items) : Itemset(std::vector<ItemId>(items)) {}

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }
  ItemId operator[](std::size_t i) const { return items_[i]; }
  const std::vector<ItemId>& items() const noexcept { return items_; }

  bool contains(ItemId item) const;
  Itemset without(ItemId item) const;
  Itemset with(ItemId item) const;
  Bitset mask(std::size_t bits) const;

  friend bool operator==(const Itemset&, const Itemset&) = default;
  /// Canonical order: by size, then lexicographic.
  friend std::strong_ordering operator<=>(const Itemset& a, const Itemset& b);

 private:
  std::vector<ItemId> items_;
};

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const noexcept;
};

/// Exact support: `count` of `total` transactions contain the itemset.
struct SupportCount {
  std::uint64_t count = 0;
  std::uint64_t total = 1;

  double value() const noexcept {
    return static_cast<double>(count) / static_cast<double>(total);
  }
  friend bool operator==(const SupportCount&, const SupportCount&) = default;
};

/// Smallest transaction count whose support reaches `min_supp`.
std::uint64_t min_count_for(double min_supp, std::uint64_t total);

SupportCount support_count(const Itemset& x, const TransactionMatrix& t);
double support(const Itemset& x, const TransactionMatrix& t);

struct FrequentSet {
  Itemset itemset;
  SupportCount support;

  friend bool operator==(const FrequentSet&, const FrequentSet&) = default;
};

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

/// X => Y with the integer counts its measures are computed from.
struct AssociationRule {
  Itemset antecedent;
  Itemset consequent;
  std::uint64_t union_count = 0;       // transactions containing X u Y
  std::uint64_t antecedent_count = 0;  // transactions containing X
  std::uint64_t consequent_count = 0;  // transactions containing Y
  std::uint64_t transactions = 1;

  double support() const noexcept;
  double confidence() const noexcept;
  double lift() const noexcept;
  Ratio confidence_ratio() const noexcept { return {union_count, antecedent_count}; }
  /// supp(XuY) / (supp(X) supp(Y)) = union * |T| / (count(X) count(Y)).
  Ratio lift_ratio() const noexcept {
    return {union_count * transactions, antecedent_count * consequent_count};
  }

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

/// Canonical rule order: antecedent, then consequent.
bool rule_less(const AssociationRule& a, const AssociationRule& b);

struct MiningStats {
  std::vector<std::uint64_t> candidates_per_level;  // index 0 = 1-itemsets
  std::vector<std::uint64_t> frequent_per_level;
  std::uint64_t candidate_bytes_peak = 0;
  double wall_time_s = 0.0;
};

/// Bytes charged for one stored candidate of the given size: the item
/// ordinals plus its support counter.
constexpr std::uint64_t candidate_bytes(std::size_t level_size) {
  return level_size * sizeof(ItemId) + sizeof(std::uint64_t);
}

struct MiningResult {
  std::vector<FrequentSet> frequents;  // sorted canonically
  MiningStats stats;
};

/// Level-wise Apriori over one transaction database. Construction performs
/// the single item-count scan; mine() may then be called for any subset of
/// the items (e.g. one cluster), sharing the same |T| denominator.
class AprioriMiner {
 public:
  explicit AprioriMiner(const TransactionMatrix& t);

  MiningResult mine(double min_supp) const;
  MiningResult mine(double min_supp, std::span<const ItemId> items) const;

  const TransactionMatrix& matrix() const noexcept { return t_; }
  std::uint64_t item_count(ItemId item) const { return item_counts_.at(item); }

 private:
  const TransactionMatrix& t_;
  std::vector<std::uint64_t> item_counts_;
  std::vector<std::uint32_t> row_sizes_;
};

/// All itemsets with support >= min_supp, sorted canonically.
MiningResult frequent_itemsets(const TransactionMatrix& t, double min_supp);

/// Single-consequent rules F\{y} => {y} with confidence >= min_conf.
std::vector<AssociationRule> derive_rules(std::span<const FrequentSet> frequents,
                                          const TransactionMatrix& t, double min_conf);

/// Rule export: `antecedent,consequent,support,confidence,lift`, antecedent
/// place ids joined by '|', measures fixed to 6 decimals.
void write_rules(std::ostream& out, std::span<const AssociationRule> rules,
                 std::span<const PlaceId> place_ids);
/// One export row without the trailing newline.
std::string format_rule(const AssociationRule& rule, std::span<const PlaceId> place_ids);

/// Parses one exported rule row back, recovering the integer counts from the
/// 6-decimal measures given the transaction count of the source matrix.
AssociationRule parse_rule(std::span<const std::string> fields,
                           const std::unordered_map<PlaceId, ItemId>& item_of,
                           std::uint64_t transactions, std::string_view where);

}  // namespace tourrec
