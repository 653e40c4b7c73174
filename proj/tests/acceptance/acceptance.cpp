// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 when
// every criterion passes, except criteria listed as known unattainable,
// which are still reported as FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tourrec/apriori.hpp"
#include "tourrec/clustering.hpp"
#include "tourrec/data_model.hpp"
#include "tourrec/error.hpp"
#include "tourrec/eval.hpp"
#include "tourrec/evolution.hpp"
#include "tourrec/hybrid.hpp"
#include "tourrec/planner.hpp"

using namespace tourrec;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

// Criteria whose literal wording cannot be met by any single formatting
// rule; they are reported but do not fail the run.
const std::set<int> kKnownUnattainable = {3};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome mining_oracle(std::vector<TransactionMatrix>& corpus) {
  Outcome o;
  Rng rng(20240601);
  auto t0 = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    auto n = static_cast<std::size_t>(rng.between(1, 12));
    auto m = static_cast<std::size_t>(rng.between(1, 64));
    double density = 0.15 + 0.6 * rng.unit();
    double s = 0.02 + 0.4 * rng.unit();
    auto t = oracle::random_matrix(rng, n, m, density);
    auto got = frequent_itemsets(t, s).frequents;
    o.require(got == oracle::frequents(t, s),
              "matrix " + std::to_string(trial) + " differs from enumeration");
    corpus.push_back(std::move(t));
  }
  double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "200 matrices, " + std::to_string(elapsed) + " s";
  return o;
}

Outcome rule_identities(const std::vector<TransactionMatrix>& corpus) {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& t : corpus) {
    auto freq = frequent_itemsets(t, 0.1).frequents;
    for (const auto& r : derive_rules(freq, t, 0.0)) {
      auto xy = r.antecedent.with(r.consequent[0]);
      auto sx = support_count(r.antecedent, t).count;
      auto sy = support_count(r.consequent, t).count;
      auto sxy = support_count(xy, t).count;
      auto total = t.rows();
      auto conf = r.confidence_ratio();
      auto lift = r.lift_ratio();
      // conf = sxy/sx; lift = conf / (sy/total) = sxy*total / (sx*sy).
      o.require(conf.num * sx == sxy * conf.den, "confidence identity");
      o.require(lift.num * (sx * sy) == (sxy * total) * lift.den, "lift identity");
      o.require(r.union_count == sxy && r.antecedent_count == sx && r.consequent_count == sy,
                "stored counts");
      ++checked;
    }
  }
  o.require(checked > 0, "no rules in corpus");
  if (o.pass) o.detail = std::to_string(checked) + " rules";
  return o;
}

Outcome table_arithmetic() {
  Outcome o;
  struct Cell {
    double base, proposed, rate;
  };
  const std::vector<Cell> time_rows = {{15.9812, 11.645, 27.133},
                                       {12.012, 8.901, 25.899},
                                       {9.519, 6.007, 36.894},
                                       {7.123, 4.451, 37.512},
                                       {4.971, 2.183, 56.085}};
  const std::vector<Cell> space_rows = {{134.983, 102.873, 23.788},
                                        {119.864, 83.611, 30.245},
                                        {98.001, 77.009, 21.42},
                                        {87.291, 62.019, 28.951},
                                        {77.917, 54.101, 30.565}};
  auto check = [&](const std::vector<Cell>& rows, const std::string& mean_text,
                   const std::string& name) {
    std::vector<double> listed, computed;
    for (const auto& c : rows) {
      double r = reduction_rate(c.base, c.proposed);
      o.require(std::abs(r - c.rate) <= 0.01, name + " cell " + std::to_string(c.rate));
      listed.push_back(c.rate);
      computed.push_back(r);
    }
    auto from_raw = format_percent(mean_reduction(computed));
    auto from_list = format_percent(mean_reduction(listed));
    o.require(from_raw == mean_text, name + " mean of raw rates " + from_raw);
    o.require(from_list == mean_text,
              name + " mean of listed rates is " + from_list + ", expected " + mean_text +
                  " (known unattainable: listed means 36.7046 and 26.9938 need different "
                  "rounding rules)");
  };
  check(time_rows, "36.704", "time");
  check(space_rows, "26.994", "space");
  if (o.pass) o.detail = "10 cells and both means";
  return o;
}

struct DefaultData {
  PlaceCatalog catalog;
  TransactionMatrix matrix;
  ClusterModel model;
};

DefaultData default_data() {
  const std::uint64_t seed = 42;
  auto catalog = load_places(TOURREC_SOURCE_DIR "/data/iraq_places.csv");
  auto data = generate_dataset(catalog, 5000, 10000, stage_seed(seed, "gen"));
  auto matrix = build_matrix(catalog, data.visitors, data.events);
  auto model = kmeans(featurize(catalog), 10, stage_seed(seed, "cluster"));
  return {std::move(catalog), std::move(matrix), std::move(model)};
}

Outcome containment(const DefaultData& d) {
  Outcome o;
  auto t0 = Clock::now();
  o.require(d.matrix.rows() == 5000 && d.matrix.items() == 232, "dataset shape");
  for (double th : kDefaultThresholds) {
    auto base = mine_baseline(d.matrix, th, 0.5);
    auto hyb = mine_hybrid(d.matrix, d.model, th, 0.5);
    const auto& bs = base.mining_stats();
    const auto& hs = hyb.mining_stats();
    auto sum = [](const std::vector<std::uint64_t>& v) {
      std::uint64_t s = 0;
      for (auto x : v) s += x;
      return s;
    };
    auto at = std::to_string(th);
    o.require(sum(hs.candidates_per_level) <= sum(bs.candidates_per_level), "candidates at " + at);
    for (std::size_t l = 0; l < hs.candidates_per_level.size(); ++l)
      o.require(l < bs.candidates_per_level.size() &&
                    hs.candidates_per_level[l] <= bs.candidates_per_level[l],
                "level candidates at " + at);
    o.require(hs.candidate_bytes_peak <= bs.candidate_bytes_peak, "bytes at " + at);
    std::vector<FrequentSet> filtered;
    for (const auto& f : base.frequents()) {
      std::set<std::uint32_t> cs;
      for (auto i : f.itemset) cs.insert(d.model.assignment[i]);
      if (cs.size() == 1) filtered.push_back(f);
    }
    o.require(hyb.frequents() == filtered, "frequent sets at " + at);
  }
  double elapsed = seconds_since(t0);
  o.require(elapsed < 120.0, "took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "5 thresholds, " + std::to_string(elapsed) + " s";
  return o;
}

Outcome performance(const DefaultData& d) {
  Outcome o;
  BenchOptions options;
  options.runs = 5;
  options.min_sample_seconds = 0.02;
  auto report = run_benchmark(d.matrix, d.model, kDefaultThresholds, options);
  o.require(report.rows.size() == 5, "row count");
  std::ostringstream note;
  for (const auto& r : report.rows) {
    auto at = std::to_string(r.min_supp);
    o.require(r.hybrid_time_s <= r.baseline_time_s, "hybrid slower at " + at);
    o.require(r.space_reduction_pct >= 10.0, "byte reduction below 10% at " + at);
    note << r.min_supp << ":" << format_percent(r.time_reduction_pct) << "/"
         << format_percent(r.space_reduction_pct) << " ";
  }
  if (!report.rows.empty())
    o.require(report.rows[0].time_reduction_pct >= 10.0, "time reduction below 10% at 0.02");
  if (o.pass) o.detail = "time/space % " + note.str();
  return o;
}

Outcome accuracy(const DefaultData& d) {
  Outcome o;
  SplitSpec spec{0.70, 5, stage_seed(42, "split")};
  auto rows = evaluate_accuracy(d.matrix, d.model, kDefaultThresholds, spec, {0.7, 0.5});
  o.require(rows.size() == 5, "row count");
  for (const auto& r : rows) {
    auto at = std::to_string(r.min_supp);
    o.require(r.folds.size() == 5, "fold count at " + at);
    o.require(r.rmse_hybrid <= r.rmse_baseline, "rmse at " + at);
    o.require(r.mae_hybrid <= r.mae_baseline, "mae at " + at);
    o.require(r.mae_hybrid <= r.rmse_hybrid && r.mae_baseline <= r.rmse_baseline,
              "mae above rmse at " + at);
    for (const auto& f : r.folds)
      o.require(f.mae_hybrid <= f.rmse_hybrid + 1e-12 && f.mae_baseline <= f.rmse_baseline + 1e-12,
                "fold mae above rmse at " + at);
  }
  if (o.pass && !rows.empty())
    o.detail = "rmse " + format_sig6(rows[0].rmse_hybrid) + " <= " +
               format_sig6(rows[0].rmse_baseline) + " at 0.02";
  return o;
}

Outcome kmeans_properties() {
  Outcome o;
  Rng rng(7001);
  for (int trial = 0; trial < 100; ++trial) {
    auto n = static_cast<std::size_t>(rng.between(2, 80));
    auto dim = static_cast<std::size_t>(rng.between(1, 6));
    auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min<std::size_t>(n, 8))));
    std::vector<FeatureVector> pts(n, FeatureVector(dim));
    for (auto& p : pts)
      for (auto& v : p) v = rng.unit();
    auto m = kmeans(pts, k, static_cast<std::uint64_t>(trial));
    auto tag = "instance " + std::to_string(trial);
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
      o.require(m.inertia_history[i] <= m.inertia_history[i - 1] + 1e-12, tag + " inertia rose");
    o.require(m.converged, tag + " did not converge");
    for (std::size_t i = 0; i < n; ++i) {
      double own = squared_distance(pts[i], m.centroids[m.assignment[i]]);
      for (const auto& c : m.centroids)
        o.require(own <= squared_distance(pts[i], c), tag + " point not nearest");
    }
    auto full = kmeans(pts, n, static_cast<std::uint64_t>(trial));
    o.require(full.inertia == 0.0, tag + " k = n inertia nonzero");
  }
  if (o.pass) o.detail = "100 instances";
  return o;
}

Outcome evolution_soundness() {
  Outcome o;
  Rng rng(8080);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = oracle::random_matrix(rng, 12, 60, 0.35);
    EvoParams p;
    p.population = 32;
    p.generations = 20;
    p.runs = 3;
    p.seed = 500 + static_cast<std::uint64_t>(trial);
    auto res = evolve_rules(t, 0.1, 0.4, p);
    auto need = min_count_for(0.1, t.rows());
    for (const auto& r : res.rules) {
      auto xy = r.antecedent.with(r.consequent[0]);
      auto cx = support_count(r.antecedent, t).count;
      auto cxy = support_count(xy, t).count;
      o.require(cxy == r.union_count && cx == r.antecedent_count, "stale counts");
      o.require(cxy >= need, "rule below min_supp");
      o.require(static_cast<double>(cxy) + 1e-9 >= 0.4 * static_cast<double>(cx),
                "rule below min_conf");
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto n = static_cast<std::size_t>(rng.between(2, 8));
    auto t = oracle::random_matrix(rng, n, 40, 0.5);
    EvoParams p;
    p.population = 256;
    p.generations = 40;
    p.runs = 4;
    p.init_density = 0.5;
    p.mutation_rate = 0.05;
    p.seed = 900 + static_cast<std::uint64_t>(trial);
    auto res = evolve_rules(t, 0.15, 0.5, p);
    auto exact = derive_rules(frequent_itemsets(t, 0.15).frequents, t, 0.5);
    o.require(oracle::plain(res.rules) == oracle::plain(exact),
              "exhaustive budget missed rules on n=" + std::to_string(n));
  }
  // Fake stats: rule_count = 1..30, so mean 15.5 and sample variance
  // 30*31/12 = 77.5; every other metric is constant 2.
  std::vector<RunStats> runs(30);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    runs[i].run = i;
    runs[i].rule_count = static_cast<double>(i + 1);
    runs[i].frequent_count = runs[i].evaluations = runs[i].best_fitness = runs[i].wall_time_s = 2;
  }
  auto agg = aggregate_runs(runs);
  o.require(agg.size() == 5 && agg[0].metric == "rule_count", "aggregate layout");
  if (agg.size() == 5) {
    o.require(std::abs(agg[0].mean - 15.5) < 1e-12, "mean");
    o.require(std::abs(agg[0].stddev - std::sqrt(77.5)) < 1e-12, "stddev");
    o.require(agg[0].min == 1 && agg[0].max == 30, "range");
    for (std::size_t i = 1; i < 5; ++i)
      o.require(agg[i].mean == 2 && agg[i].stddev == 0, "constant metric");
  }
  if (o.pass) o.detail = "20 soundness, 20 exhaustive, 30-run aggregate";
  return o;
}

// ---------------------------------------------------------------------------
// CLI runs

int run_cli(const fs::path& dir, const std::string& args) {
  std::string cmd = "cd '" + dir.string() + "' && '" TOURREC_CLI "' pipeline --places '" +
                    TOURREC_SOURCE_DIR "/data/iraq_places.csv' --out out " + args +
                    " > cli.log 2>&1";
  return std::system(cmd.c_str());
}

// Removes sections and lines that carry wall-clock measurements.
std::string without_timing(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  bool skipping = false;
  while (std::getline(in, line)) {
    if (name == "report.txt" && line.rfind("## ", 0) == 0)
      skipping = line == "## Execution time" || line == "## Host";
    if (skipping) continue;
    if (name == "bench_rows.csv" && line.rfind("time", 0) == 0) continue;
    if (name == "evo_stats.txt" && line.find("wall_time") != std::string::npos) continue;
    out << line << '\n';
  }
  return out.str();
}

struct PipelineRuns {
  bool ran = false;
  double first_seconds = 0;
  fs::path a, b;
};

PipelineRuns run_twice() {
  PipelineRuns r;
  auto root = fs::temp_directory_path() / "tourrec_acceptance";
  fs::remove_all(root);
  r.a = root / "a";
  r.b = root / "b";
  fs::create_directories(r.a);
  fs::create_directories(r.b);
  auto t0 = Clock::now();
  int ca = run_cli(r.a, "");
  r.first_seconds = seconds_since(t0);
  int cb = run_cli(r.b, "");
  r.ran = ca == 0 && cb == 0;
  return r;
}

Outcome determinism(const PipelineRuns& r) {
  Outcome o;
  o.require(r.ran, "pipeline exited non-zero");
  if (!r.ran) return o;
  std::size_t compared = 0;
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(r.a / "out")) names.insert(e.path().filename());
  for (const auto& e : fs::directory_iterator(r.b / "out")) names.insert(e.path().filename());
  for (const auto& name : names) {
    if (name.rfind("time_", 0) == 0) continue;
    auto x = r.a / "out" / name, y = r.b / "out" / name;
    o.require(fs::exists(x) && fs::exists(y), name + " missing in one run");
    if (!fs::exists(x) || !fs::exists(y)) continue;
    o.require(without_timing(name, slurp(x)) == without_timing(name, slurp(y)), name + " differs");
    ++compared;
  }
  if (o.pass) o.detail = std::to_string(compared) + " files identical";
  return o;
}

Outcome smoke(const PipelineRuns& r) {
  Outcome o;
  o.require(r.ran, "pipeline exited non-zero");
  if (!r.ran) return o;
  o.require(r.first_seconds < 300.0, "took " + std::to_string(r.first_seconds) + " s");
  auto out = r.a / "out";

  std::istringstream rows(slurp(out / "bench_rows.csv"));
  std::set<std::string> thresholds;
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (line.rfind("candidate_bytes,", 0) == 0) thresholds.insert(line.substr(c1 + 1, c2 - c1 - 1));
  }
  o.require(thresholds.size() == 5, "bench rows cover " + std::to_string(thresholds.size()) +
                                        " thresholds");
  auto report = slurp(out / "report.txt");
  for (auto th : {"0.02", "0.04", "0.06", "0.08", "0.10"})
    o.require(report.find(std::string("\n") + th + " ") != std::string::npos,
              std::string("report lacks ") + th);

  auto catalog = load_places(TOURREC_SOURCE_DIR "/data/iraq_places.csv");
  std::istringstream recs(slurp(out / "recommendations.csv"));
  std::getline(recs, line);
  std::size_t rec_count = 0;
  std::set<PlaceId> recommended;
  while (std::getline(recs, line)) {
    std::istringstream f(line);
    std::string visitor, rank, place;
    std::getline(f, visitor, ',');
    std::getline(f, rank, ',');
    std::getline(f, place, ',');
    recommended.insert(static_cast<PlaceId>(std::stoul(place)));
    ++rec_count;
  }
  o.require(rec_count > 0, "no recommendations");

  std::istringstream it(slurp(out / "itinerary.csv"));
  std::getline(it, line);
  o.require(line == "day,stop_index,place_id,name,leg_km", "itinerary header");
  std::size_t stops = 0;
  std::set<PlaceId> seen;
  std::map<int, int> per_day;
  while (std::getline(it, line)) {
    std::istringstream f(line);
    std::string day, idx, place;
    std::getline(f, day, ',');
    std::getline(f, idx, ',');
    std::getline(f, place, ',');
    auto pid = static_cast<PlaceId>(std::stoul(place));
    o.require(catalog.item_of(pid).has_value(), "itinerary place not in catalog");
    o.require(recommended.count(pid) == 1, "itinerary place not recommended");
    o.require(seen.insert(pid).second, "itinerary repeats a place");
    ++per_day[std::stoi(day)];
    ++stops;
  }
  o.require(stops > 0, "empty itinerary");
  o.require(stops <= 12, "itinerary exceeds days * per_day");
  for (auto [day, n] : per_day) o.require(day >= 1 && day <= 3 && n <= 4, "day capacity");
  if (o.pass)
    o.detail = std::to_string(r.first_seconds) + " s, " + std::to_string(rec_count) +
               " recommendations, " + std::to_string(stops) + " stops";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name;
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    if (!o.pass && kKnownUnattainable.count(id)) std::cout << " [known unattainable]";
    std::cout << std::endl;
    if (!o.pass && !kKnownUnattainable.count(id)) ++failures;
  };

  std::vector<TransactionMatrix> corpus;
  report(1, "mining oracle equivalence", [&] { return mining_oracle(corpus); });
  report(2, "rule identities", [&] { return rule_identities(corpus); });
  report(3, "reduction arithmetic", table_arithmetic);

  auto data = default_data();
  report(4, "candidate containment", [&] { return containment(data); });
  report(5, "performance trend", [&] { return performance(data); });
  report(6, "accuracy direction", [&] { return accuracy(data); });
  report(7, "k-means properties", kmeans_properties);
  report(8, "evolutionary soundness", evolution_soundness);

  auto runs = run_twice();
  report(9, "determinism", [&] { return determinism(runs); });
  report(10, "end-to-end smoke", [&] { return smoke(runs); });

  std::cout << (failures ? "acceptance: FAILED" : "acceptance: OK") << std::endl;
  return failures ? 1 : 0;
}
