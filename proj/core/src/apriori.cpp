#include "tourrec/apriori.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "csv.hpp"
#include "tourrec/error.hpp"

namespace tourrec {

Itemset::Itemset(std::vector<ItemId> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool Itemset::contains(ItemId item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

Itemset Itemset::without(ItemId item) const {
  Itemset out;
  out.items_.reserve(items_.size());
  for (auto i : items_)
    if (i != item) out.items_.push_back(i);
  return out;
}

Itemset Itemset::with(ItemId item) const {
  auto items = items_;
  items.push_back(item);
  return Itemset(std::move(items));
}

Bitset Itemset::mask(std::size_t bits) const {
  Bitset b(bits);
  for (auto i : items_) b.set(i);
  return b;
}

std::strong_ordering operator<=>(const Itemset& a, const Itemset& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.items_ <=> b.items_;
}

std::size_t ItemsetHash::operator()(const Itemset& s) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (auto i : s) {
    h ^= i;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

std::uint64_t min_count_for(double min_supp, std::uint64_t total) {
  // The slack keeps decimal thresholds such as 0.1 * 50 from rounding up.
  auto c = std::ceil(min_supp * static_cast<double>(total) - 1e-9);
  return static_cast<std::uint64_t>(std::max(c, 0.0));
}

SupportCount support_count(const Itemset& x, const TransactionMatrix& t) {
  for (auto i : x)
    if (i >= t.items())
      throw Error(ErrorCode::ItemOutOfRange, "item " + std::to_string(i) + " out of range (n=" +
                                                 std::to_string(t.items()) + ")");
  auto mask = x.mask(t.items());
  std::uint64_t count = 0;
  for (const auto& row : t.row_bits())
    if (mask.is_subset_of(row)) ++count;
  return {count, t.rows()};
}

double support(const Itemset& x, const TransactionMatrix& t) {
  return support_count(x, t).value();
}

double AssociationRule::support() const noexcept {
  return static_cast<double>(union_count) / static_cast<double>(transactions);
}

double AssociationRule::confidence() const noexcept {
  return static_cast<double>(union_count) / static_cast<double>(antecedent_count);
}

double AssociationRule::lift() const noexcept {
  auto r = lift_ratio();
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

bool rule_less(const AssociationRule& a, const AssociationRule& b) {
  if (auto c = a.antecedent <=> b.antecedent; c != 0) return c < 0;
  return a.consequent < b.consequent;
}

// ---------------------------------------------------------------------------

AprioriMiner::AprioriMiner(const TransactionMatrix& t)
    : t_(t), item_counts_(t.items(), 0), row_sizes_(t.rows(), 0) {
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::uint32_t size = 0;
    t.row(r).for_each([&](std::size_t i) {
      ++item_counts_[i];
      ++size;
    });
    row_sizes_[r] = size;
  }
}

MiningResult AprioriMiner::mine(double min_supp) const {
  std::vector<ItemId> all(t_.items());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ItemId>(i);
  return mine(min_supp, all);
}

MiningResult AprioriMiner::mine(double min_supp, std::span<const ItemId> items) const {
  if (!(min_supp > 0.0 && min_supp <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "min support must be in (0,1]");
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t total = t_.rows();
  const std::uint64_t min_count = min_count_for(min_supp, total);
  const std::size_t n = t_.items();

  MiningResult out;
  auto& stats = out.stats;

  // Level 1 from the item scan.
  std::vector<ItemId> level1(items.begin(), items.end());
  std::sort(level1.begin(), level1.end());
  level1.erase(std::unique(level1.begin(), level1.end()), level1.end());
  for (auto i : level1)
    if (i >= n) throw Error(ErrorCode::ItemOutOfRange, "item " + std::to_string(i) + " out of range");
  stats.candidates_per_level.push_back(level1.size());
  stats.candidate_bytes_peak = level1.size() * candidate_bytes(1);

  std::vector<std::vector<ItemId>> frequent;  // current level, lexicographic
  for (auto i : level1) {
    if (item_counts_[i] >= min_count) {
      frequent.push_back({i});
      out.frequents.push_back({Itemset{i}, {item_counts_[i], total}});
    }
  }
  stats.frequent_per_level.push_back(frequent.size());

  std::vector<std::vector<ItemId>> candidates;
  std::vector<Bitset> masks;
  std::vector<std::uint64_t> counts;
  for (std::size_t k = 2; frequent.size() >= 2; ++k) {
    // Join pairs sharing their first k-2 items; prune by anti-monotonicity.
    candidates.clear();
    for (std::size_t a = 0; a < frequent.size(); ++a) {
      for (std::size_t b = a + 1; b < frequent.size(); ++b) {
        if (!std::equal(frequent[a].begin(), frequent[a].end() - 1, frequent[b].begin()))
          break;
        auto cand = frequent[a];
        cand.push_back(frequent[b].back());
        bool keep = true;
        std::vector<ItemId> sub;
        for (std::size_t drop = 0; drop + 2 < cand.size() && keep; ++drop) {
          sub.assign(cand.begin(), cand.end());
          sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
          keep = std::binary_search(frequent.begin(), frequent.end(), sub);
        }
        if (keep) candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;
    stats.candidates_per_level.push_back(candidates.size());
    stats.candidate_bytes_peak =
        std::max<std::uint64_t>(stats.candidate_bytes_peak, candidates.size() * candidate_bytes(k));

    // One pass over the database per level.
    masks.clear();
    for (const auto& c : candidates) {
      Bitset m(n);
      for (auto i : c) m.set(i);
      masks.push_back(std::move(m));
    }
    counts.assign(candidates.size(), 0);
    for (std::size_t r = 0; r < t_.rows(); ++r) {
      if (row_sizes_[r] < k) continue;
      const auto& row = t_.row(r);
      for (std::size_t c = 0; c < masks.size(); ++c)
        if (masks[c].is_subset_of(row)) ++counts[c];
    }

    std::vector<std::vector<ItemId>> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (counts[c] < min_count) continue;
      out.frequents.push_back({Itemset(candidates[c]), {counts[c], total}});
      next.push_back(std::move(candidates[c]));
    }
    stats.frequent_per_level.push_back(next.size());
    frequent = std::move(next);
  }

  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

MiningResult frequent_itemsets(const TransactionMatrix& t, double min_supp) {
  const auto start = std::chrono::steady_clock::now();
  AprioriMiner miner(t);
  auto result = miner.mine(min_supp);
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<AssociationRule> derive_rules(std::span<const FrequentSet> frequents,
                                          const TransactionMatrix& t, double min_conf) {
  if (!(min_conf >= 0.0 && min_conf <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "min confidence must be in [0,1]");
  std::unordered_map<Itemset, std::uint64_t, ItemsetHash> known;
  known.reserve(frequents.size());
  for (const auto& f : frequents) known.emplace(f.itemset, f.support.count);
  auto count_of = [&](const Itemset& s) {
    if (auto it = known.find(s); it != known.end()) return it->second;
    auto c = support_count(s, t).count;
    known.emplace(s, c);
    return c;
  };

  std::vector<AssociationRule> rules;
  for (const auto& f : frequents) {
    if (f.itemset.size() < 2) continue;
    for (auto y : f.itemset) {
      AssociationRule r;
      r.antecedent = f.itemset.without(y);
      r.consequent = Itemset{y};
      r.union_count = f.support.count;
      r.antecedent_count = count_of(r.antecedent);
      r.consequent_count = count_of(r.consequent);
      r.transactions = t.rows();
      if (r.antecedent_count == 0) continue;
      // confidence >= min_conf, compared on the integer counts.
      double needed = min_conf * static_cast<double>(r.antecedent_count);
      if (static_cast<double>(r.union_count) + 1e-9 < needed) continue;
      rules.push_back(std::move(r));
    }
  }
  std::sort(rules.begin(), rules.end(), rule_less);
  return rules;
}

// ---------------------------------------------------------------------------

std::string format_rule(const AssociationRule& rule, std::span<const PlaceId> place_ids) {
  std::string line;
  bool first = true;
  for (auto i : rule.antecedent) {
    if (!first) line.push_back('|');
    line += std::to_string(place_ids[i]);
    first = false;
  }
  line.push_back(',');
  line += std::to_string(place_ids[rule.consequent[0]]);
  line += ',' + csv::fixed6(rule.support());
  line += ',' + csv::fixed6(rule.confidence());
  line += ',' + csv::fixed6(rule.lift());
  return line;
}

void write_rules(std::ostream& out, std::span<const AssociationRule> rules,
                 std::span<const PlaceId> place_ids) {
  out << "antecedent,consequent,support,confidence,lift\n";
  for (const auto& r : rules) out << format_rule(r, place_ids) << '\n';
}

namespace {

// Finds the integer d near `estimate` for which fixed6(num / d) == text.
std::uint64_t recover_denominator(double num, double estimate, std::uint64_t lo,
                                  std::uint64_t hi, const std::string& text) {
  auto centre = static_cast<std::int64_t>(std::llround(estimate));
  auto radius = static_cast<std::int64_t>(std::ceil(estimate * 0.02)) + 2;
  std::uint64_t best = 0;
  std::int64_t best_gap = -1;
  for (auto d = centre - radius; d <= centre + radius; ++d) {
    if (d < static_cast<std::int64_t>(lo) || d > static_cast<std::int64_t>(hi) || d <= 0) continue;
    if (csv::fixed6(num / static_cast<double>(d)) != text) continue;
    auto gap = std::llabs(d - centre);
    if (best_gap < 0 || gap < best_gap) {
      best = static_cast<std::uint64_t>(d);
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

AssociationRule parse_rule(std::span<const std::string> fields,
                           const std::unordered_map<PlaceId, ItemId>& item_of,
                           std::uint64_t transactions, std::string_view where) {
  auto bad = [&](std::string_view detail) {
    throw Error(ErrorCode::MalformedRow, std::string(where) + ": " + std::string(detail));
  };
  if (fields.size() != 5) bad("expected 5 rule fields");
  auto lookup = [&](std::string_view text) {
    auto id = csv::parse_number<PlaceId>(text);
    if (!id) bad("bad place id");
    auto it = item_of.find(*id);
    if (it == item_of.end())
      throw Error(ErrorCode::UnknownPlaceId,
                  std::string(where) + ": unknown place id " + std::string(text));
    return it->second;
  };
  std::vector<ItemId> lhs;
  for (const auto& part : csv::split(fields[0], '|')) lhs.push_back(lookup(part));
  AssociationRule r;
  r.antecedent = Itemset(std::move(lhs));
  r.consequent = Itemset{lookup(fields[1])};
  r.transactions = transactions;

  auto supp = csv::parse_number<double>(fields[2]);
  auto conf = csv::parse_number<double>(fields[3]);
  auto lift = csv::parse_number<double>(fields[4]);
  if (!supp || !conf || !lift || *conf <= 0.0 || *lift <= 0.0) bad("bad rule measures");
  auto total = static_cast<double>(transactions);
  r.union_count = static_cast<std::uint64_t>(std::llround(*supp * total));
  if (csv::fixed6(r.support()) != fields[2] || r.union_count == 0) bad("support inconsistent with |T|");
  auto u = static_cast<double>(r.union_count);
  r.antecedent_count = recover_denominator(u, u / *conf, r.union_count, transactions, fields[3]);
  if (r.antecedent_count == 0) bad("confidence inconsistent with counts");
  auto a = static_cast<double>(r.antecedent_count);
  r.consequent_count =
      recover_denominator(u * total / a, u * total / (*lift * a), r.union_count, transactions, fields[4]);
  if (r.consequent_count == 0) bad("lift inconsistent with counts");
  return r;
}

}  // namespace tourrec
