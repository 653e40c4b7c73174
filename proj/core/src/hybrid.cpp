#include "tourrec/hybrid.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "csv.hpp"
#include "tourrec/error.hpp"

namespace tourrec {

std::string_view to_string(RuleSource s) noexcept {
  return s == RuleSource::Hybrid ? "hybrid" : "baseline";
}

RuleBase::RuleBase(RuleSource source, std::size_t items,
                   std::vector<std::vector<AssociationRule>> per_cluster,
                   std::vector<FrequentSet> frequents, MiningStats stats)
    : source_(source),
      items_(items),
      per_cluster_(std::move(per_cluster)),
      frequents_(std::move(frequents)),
      stats_(std::move(stats)),
      by_consequent_(items) {
  for (std::size_t c = 0; c < per_cluster_.size(); ++c) {
    for (std::size_t i = 0; i < per_cluster_[c].size(); ++i) {
      const auto& r = per_cluster_[c][i];
      auto target = r.consequent[0];
      if (target >= items_) throw Error(ErrorCode::ItemOutOfRange, "rule consequent out of range");
      by_consequent_[target].push_back(
          {r.antecedent.mask(items_), r.confidence(),
           {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i)}});
    }
  }
}

std::size_t RuleBase::rule_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : per_cluster_) n += c.size();
  return n;
}

std::vector<AssociationRule> RuleBase::all_rules() const {
  std::vector<AssociationRule> out;
  for (const auto& c : per_cluster_) out.insert(out.end(), c.begin(), c.end());
  return out;
}

namespace {

void add_levels(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
  if (into.size() < from.size()) into.resize(from.size(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

}  // namespace

RuleBase mine_hybrid(const TransactionMatrix& t, const ClusterModel& model, double min_supp,
                     double min_conf) {
  if (model.assignment.size() != t.items())
    throw Error(ErrorCode::DimensionMismatch, "cluster assignment covers " +
                                                  std::to_string(model.assignment.size()) +
                                                  " items, matrix has " +
                                                  std::to_string(t.items()));
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<ItemId>> members(model.k);
  for (std::size_t i = 0; i < model.assignment.size(); ++i) {
    auto c = model.assignment[i];
    if (c >= model.k) throw Error(ErrorCode::InvalidArgument, "cluster id out of range");
    members[c].push_back(static_cast<ItemId>(i));
  }

  AprioriMiner miner(t);
  std::vector<std::vector<AssociationRule>> per_cluster;
  std::vector<FrequentSet> frequents;
  MiningStats stats;
  for (const auto& items : members) {
    auto result = miner.mine(min_supp, items);
    per_cluster.push_back(derive_rules(result.frequents, t, min_conf));
    add_levels(stats.candidates_per_level, result.stats.candidates_per_level);
    add_levels(stats.frequent_per_level, result.stats.frequent_per_level);
    stats.candidate_bytes_peak =
        std::max(stats.candidate_bytes_peak, result.stats.candidate_bytes_peak);
    frequents.insert(frequents.end(), result.frequents.begin(), result.frequents.end());
  }
  std::sort(frequents.begin(), frequents.end(),
            [](const FrequentSet& a, const FrequentSet& b) { return a.itemset < b.itemset; });
  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RuleBase(RuleSource::Hybrid, t.items(), std::move(per_cluster), std::move(frequents),
                  std::move(stats));
}

RuleBase mine_baseline(const TransactionMatrix& t, double min_supp, double min_conf) {
  const auto start = std::chrono::steady_clock::now();
  AprioriMiner miner(t);
  auto result = miner.mine(min_supp);
  std::vector<std::vector<AssociationRule>> per_cluster;
  per_cluster.push_back(derive_rules(result.frequents, t, min_conf));
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RuleBase(RuleSource::Baseline, t.items(), std::move(per_cluster),
                  std::move(result.frequents), std::move(result.stats));
}

// ---------------------------------------------------------------------------

Scorer::Scorer(const RuleBase& rules, const ClusterModel& model, double alpha)
    : rules_(rules), model_(model), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha must be in [0,1]");
  if (model.assignment.size() != rules.items())
    throw Error(ErrorCode::DimensionMismatch, "cluster model and rule base disagree on items");
}

PlaceScore Scorer::score(const Bitset& history, ItemId place) const {
  if (place >= rules_.items()) throw Error(ErrorCode::ItemOutOfRange, "place out of range");
  if (history.test(place))
    throw Error(ErrorCode::InvalidArgument, "place is already in the visitor history");
  PlaceScore s;
  for (const auto& e : rules_.rules_into(place)) {
    if (!e.antecedent.is_subset_of(history)) continue;
    s.rule_score = std::max(s.rule_score, e.confidence);
    s.evidence.push_back(e.ref);
  }
  std::size_t in_cluster = 0, total = 0;
  const auto target = model_.assignment[place];
  history.for_each([&](std::size_t i) {
    ++total;
    if (model_.assignment[i] == target) ++in_cluster;
  });
  s.affinity = total ? static_cast<double>(in_cluster) / static_cast<double>(total) : 0.0;
  s.score = alpha_ * s.rule_score + (1.0 - alpha_) * s.affinity;
  return s;
}

PlaceScore score_place(const Itemset& history, ItemId place, const RuleBase& rules,
                       const ClusterModel& model, double alpha) {
  return Scorer(rules, model, alpha).score(history.mask(rules.items()), place);
}

std::vector<Recommendation> recommend(const Bitset& visitor_row, const RuleBase& rules,
                                      const ClusterModel& model,
                                      std::span<const PlaceId> place_ids, std::size_t top_n,
                                      double alpha) {
  if (top_n < 1) throw Error(ErrorCode::InvalidArgument, "top_n must be >= 1");
  if (place_ids.size() != rules.items() || visitor_row.size() != rules.items())
    throw Error(ErrorCode::DimensionMismatch, "visitor row / place ids do not match rule base");
  Scorer scorer(rules, model, alpha);
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < rules.items(); ++i) {
    if (visitor_row.test(i)) continue;
    auto s = scorer.score(visitor_row, static_cast<ItemId>(i));
    out.push_back({place_ids[i], static_cast<ItemId>(i), s.score, std::move(s.evidence),
                   s.affinity});
  }
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.place_id < b.place_id;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

void write_recommendations(std::ostream& out, VisitorId visitor,
                           std::span<const Recommendation> recs) {
  out << "visitor_id,rank,place_id,score,rule_count,affinity\n";
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const auto& rec = recs[r];
    out << visitor << ',' << r + 1 << ',' << rec.place_id << ',' << csv::fixed6(rec.score) << ','
        << rec.rule_evidence.size() << ',' << csv::fixed6(rec.cluster_affinity) << '\n';
  }
}

void write_rulebase(std::ostream& out, const RuleBase& rules, std::span<const PlaceId> place_ids) {
  out << "cluster,antecedent,consequent,support,confidence,lift\n";
  for (std::size_t c = 0; c < rules.per_cluster().size(); ++c)
    for (const auto& r : rules.per_cluster()[c]) out << c << ',' << format_rule(r, place_ids) << '\n';
}

RuleBase read_rulebase(std::istream& in, const TransactionMatrix& t, std::size_t clusters,
                       RuleSource source, std::string_view name) {
  std::string line;
  if (!csv::next_line(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, std::string(name) + ": empty rule file");
  if (line != "cluster,antecedent,consequent,support,confidence,lift")
    csv::malformed(name, 1, "unexpected rule header");
  std::unordered_map<PlaceId, ItemId> item_of;
  for (std::size_t i = 0; i < t.items(); ++i) item_of.emplace(t.place_ids()[i], static_cast<ItemId>(i));

  std::vector<std::vector<AssociationRule>> per_cluster(std::max<std::size_t>(clusters, 1));
  std::size_t line_no = 1;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = csv::split(line);
    auto where = std::string(name) + ":" + std::to_string(line_no);
    if (f.size() != 6) csv::malformed(name, line_no, "expected 6 fields");
    auto c = csv::parse_number<std::size_t>(f[0]);
    if (!c || *c >= per_cluster.size()) csv::malformed(name, line_no, "bad cluster id");
    per_cluster[*c].push_back(
        parse_rule(std::span<const std::string>(f).subspan(1), item_of, t.rows(), where));
  }
  return RuleBase(source, t.items(), std::move(per_cluster), {}, {});
}

}  // namespace tourrec
