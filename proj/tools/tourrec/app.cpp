#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "tourrec/apriori.hpp"
#include "tourrec/clustering.hpp"
#include "tourrec/error.hpp"
#include "tourrec/hybrid.hpp"
#include "tourrec/planner.hpp"
#include "tourrec/rng.hpp"

namespace tourrec::app {

namespace fs = std::filesystem;

fs::path RunConfig::visitors_path() const {
  return visitors_file.empty() ? out / "visitors.csv" : visitors_file;
}

fs::path RunConfig::transactions_path() const {
  return transactions_file.empty() ? out / "transactions.csv" : transactions_file;
}

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (k < 1) bad("k must be >= 1");
  if (thresholds.empty()) bad("at least one min_support is required");
  for (double t : thresholds)
    if (!(t > 0.0 && t <= 1.0)) bad("min_support must be in (0,1]");
  if (!(min_conf >= 0.0 && min_conf <= 1.0)) bad("min_conf must be in [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must be in [0,1]");
  if (folds < 2) bad("folds must be >= 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) bad("train_frac must be in (0,1)");
  if (!(evo_min_support >= 0.0 && evo_min_support <= 1.0)) bad("evo_min_support must be in [0,1]");
  if (bench_runs < 1) bad("bench_runs must be >= 1");
  if (!(bench_min_sample_s >= 0.0)) bad("bench_min_sample_s must be >= 0");
  if (top_n < 1) bad("top_n must be >= 1");
  if (days < 1 || per_day < 1) bad("days and per_day must be >= 1");
  if (start && !valid_coordinate(*start)) bad("start is not a valid coordinate");
  evo.validate();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  std::ostringstream x, y;
  write_config(x, a);
  write_config(y, b);
  return x.str() == y.str();
}

// ---------------------------------------------------------------------------
// Config text
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidArgument,
              "bad value '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T parse_as(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) bad_value(key, text);
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) bad_value(key, text);
  return value;
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = text.find(',');
    out.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

struct Key {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key number_key(std::string_view name, T RunConfig::*field) {
  return {name, [name, field](RunConfig& c, std::string_view v) { c.*field = parse_as<T>(name, v); },
          [field](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return num(static_cast<double>(c.*field));
            else
              return num(static_cast<std::uint64_t>(c.*field));
          }};
}

template <typename T>
Key evo_key(std::string_view name, T EvoParams::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.evo.*field = parse_as<T>(name, v); },
          [field](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return num(static_cast<double>(c.evo.*field));
            else
              return num(static_cast<std::uint64_t>(c.evo.*field));
          }};
}

Key path_key(std::string_view name, fs::path RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = fs::path(std::string(trim(v))); },
          [field](const RunConfig& c) { return (c.*field).string(); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      path_key("places", &RunConfig::places),
      path_key("visitors_file", &RunConfig::visitors_file),
      path_key("transactions_file", &RunConfig::transactions_file),
      path_key("out", &RunConfig::out),
      number_key("seed", &RunConfig::seed),
      number_key("visitors", &RunConfig::visitors),
      number_key("events", &RunConfig::events),
      number_key("k", &RunConfig::k),
      number_key("category_weight", &RunConfig::category_weight),
      {"min_support",
       [](RunConfig& c, std::string_view v) {
         std::vector<double> list;
         for (auto item : split_list(v)) list.push_back(parse_as<double>("min_support", item));
         std::sort(list.begin(), list.end());
         list.erase(std::unique(list.begin(), list.end()), list.end());
         c.thresholds = std::move(list);
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.thresholds.size(); ++i)
           s += (i ? "," : "") + num(c.thresholds[i]);
         return s;
       }},
      number_key("min_conf", &RunConfig::min_conf),
      number_key("alpha", &RunConfig::alpha),
      number_key("folds", &RunConfig::folds),
      number_key("train_frac", &RunConfig::train_fraction),
      evo_key("runs", &EvoParams::runs),
      evo_key("evo_population", &EvoParams::population),
      evo_key("evo_generations", &EvoParams::generations),
      evo_key("evo_mutation_rate", &EvoParams::mutation_rate),
      evo_key("evo_crossover_rate", &EvoParams::crossover_rate),
      evo_key("evo_init_density", &EvoParams::init_density),
      evo_key("evo_penalty", &EvoParams::penalty),
      number_key("evo_min_support", &RunConfig::evo_min_support),
      number_key("bench_runs", &RunConfig::bench_runs),
      number_key("bench_min_sample_s", &RunConfig::bench_min_sample_s),
      {"visitor",
       [](RunConfig& c, std::string_view v) {
         v = trim(v);
         if (v.empty())
           c.visitor.reset();
         else
           c.visitor = parse_as<VisitorId>("visitor", v);
       },
       [](const RunConfig& c) { return c.visitor ? num(std::uint64_t{*c.visitor}) : std::string(); }},
      number_key("top_n", &RunConfig::top_n),
      number_key("days", &RunConfig::days),
      number_key("per_day", &RunConfig::per_day),
      {"start",
       [](RunConfig& c, std::string_view v) {
         v = trim(v);
         if (v.empty()) {
           c.start.reset();
           return;
         }
         auto parts = split_list(v);
         if (parts.size() != 2) bad_value("start", v);
         c.start = GeoPoint{parse_as<double>("start", parts[0]), parse_as<double>("start", parts[1])};
       },
       [](const RunConfig& c) {
         return c.start ? num(c.start->lat) + "," + num(c.start->lon) : std::string();
       }},
  };
  return table;
}

}  // namespace

void set_key(RunConfig& config, std::string_view key, std::string_view value) {
  std::string normal(trim(key));
  std::replace(normal.begin(), normal.end(), '-', '_');
  if (normal == "thresholds") normal = "min_support";
  for (const auto& k : keys()) {
    if (k.name == normal) {
      k.set(config, value);
      return;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown config key '" + std::string(key) + "'");
}

void parse_config(std::istream& in, RunConfig& config, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument,
                  std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      set_key(config, text.substr(0, eq), text.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  parse_config(in, config, path.string());
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

void prepare(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out);
  auto out = open_out(config.out / "effective.cfg");
  write_config(out, config);
}

SplitSpec split_spec(const RunConfig& c) {
  return {c.train_fraction, c.folds, stage_seed(c.seed, "split")};
}

double rule_support(const RunConfig& c) { return c.thresholds.front(); }

struct Inputs {
  PlaceCatalog catalog;
  TransactionMatrix matrix;
};

Inputs load_inputs(const RunConfig& c) {
  Inputs in{load_places(c.places), load_transactions(c.transactions_path())};
  if (in.matrix.place_ids() != in.catalog.ids())
    throw Error(ErrorCode::DimensionMismatch,
                c.transactions_path().string() + " columns do not match " + c.places.string());
  return in;
}

ClusterModel load_model(const RunConfig& c, const PlaceCatalog& catalog) {
  return load_clusters(c.out / "clusters.csv", catalog);
}

void gen_stage(const RunConfig& c, const PlaceCatalog& catalog) {
  auto data = generate_dataset(catalog, c.visitors, c.events, stage_seed(c.seed, "gen"));
  auto matrix = build_matrix(catalog, data.visitors, data.events);
  auto v = open_out(c.visitors_path());
  write_visitors(v, data.visitors);
  auto t = open_out(c.transactions_path());
  write_transactions(t, matrix);
}

ClusterModel cluster_stage(const RunConfig& c, const PlaceCatalog& catalog) {
  auto points = featurize(catalog, c.category_weight);
  auto model = kmeans(points, c.k, stage_seed(c.seed, "cluster"));
  auto out = open_out(c.out / "clusters.csv");
  write_clusters(out, model, catalog);
  return model;
}

void write_level_stats(std::ostream& out, double th, std::string_view system, const RuleBase& rb) {
  const auto& s = rb.mining_stats();
  char supp[32];
  std::snprintf(supp, sizeof supp, "%.2f", th);
  for (std::size_t l = 0; l < s.candidates_per_level.size(); ++l)
    out << supp << ',' << system << ',' << l + 1 << ',' << s.candidates_per_level[l] << ','
        << (l < s.frequent_per_level.size() ? s.frequent_per_level[l] : 0) << ','
        << s.candidate_bytes_peak << ',' << rb.rule_count() << '\n';
}

void mine_stage(const RunConfig& c, const Inputs& in, const ClusterModel& model) {
  const auto& ids = in.matrix.place_ids();
  {
    auto hybrid = mine_hybrid(in.matrix, model, rule_support(c), c.min_conf);
    auto baseline = mine_baseline(in.matrix, rule_support(c), c.min_conf);
    auto h = open_out(c.out / "rules_hybrid.csv");
    write_rulebase(h, hybrid, ids);
    auto b = open_out(c.out / "rules_baseline.csv");
    write_rulebase(b, baseline, ids);
  }

  auto stats = open_out(c.out / "mining_stats.csv");
  stats << "min_supp,system,level,candidates,frequent,candidate_bytes_peak,rules\n";
  for (double th : c.thresholds) {
    write_level_stats(stats, th, "baseline", mine_baseline(in.matrix, th, c.min_conf));
    write_level_stats(stats, th, "hybrid", mine_hybrid(in.matrix, model, th, c.min_conf));
  }

  auto params = c.evo;
  params.seed = stage_seed(c.seed, "evo");
  double evo_supp = c.evo_min_support > 0 ? c.evo_min_support : rule_support(c);
  auto evo = evolve_rules(in.matrix, evo_supp, c.min_conf, params);
  auto rules = open_out(c.out / "evo_rules.csv");
  write_rules(rules, evo.rules, ids);

  auto text = open_out(c.out / "evo_stats.txt");
  char line[256];
  std::snprintf(line, sizeof line, "min_supp %.6g, min_conf %.6g, runs %zu, rules (union) %zu\n",
                evo_supp, c.min_conf, evo.runs.size(), evo.rules.size());
  text << line;
  for (const auto& r : evo.runs) {
    std::snprintf(line, sizeof line,
                  "run %zu seed %llu rules %.0f frequent %.0f evaluations %.0f best_fitness %.6g\n",
                  r.run, static_cast<unsigned long long>(r.seed), r.rule_count, r.frequent_count,
                  r.evaluations, r.best_fitness);
    text << line;
    std::snprintf(line, sizeof line, "run %zu wall_time_s %.6g\n", r.run, r.wall_time_s);
    text << line;
  }
  for (const auto& m : aggregate_runs(evo.runs)) {
    std::snprintf(line, sizeof line, "%s mean %.6g stddev %.6g min %.6g max %.6g\n",
                  m.metric.c_str(), m.mean, m.stddev, m.min, m.max);
    text << line;
  }
}

std::vector<AccuracyRow> eval_stage(const RunConfig& c, const Inputs& in,
                                    const ClusterModel& model) {
  AccuracyOptions options{c.alpha, c.min_conf};
  auto cv = evaluate_accuracy(in.matrix, model, c.thresholds, split_spec(c), options);
  auto holdout = evaluate_holdout(in.matrix, model, c.thresholds, split_spec(c), options);
  auto a = open_out(c.out / "accuracy_cv.csv");
  write_accuracy(a, cv);
  auto b = open_out(c.out / "accuracy_holdout.csv");
  write_accuracy(b, holdout);
  return cv;
}

BenchReport bench_stage(const RunConfig& c, const Inputs& in, const ClusterModel& model,
                        std::vector<AccuracyRow> accuracy) {
  BenchOptions options;
  options.runs = c.bench_runs;
  options.min_sample_seconds = c.bench_min_sample_s;
  options.min_conf = c.min_conf;
  auto report = run_benchmark(in.matrix, model, c.thresholds, options);
  report.accuracy = std::move(accuracy);
  report.peak_rss_kb = peak_rss_kb();
  auto text = open_out(c.out / "report.txt");
  write_report_text(text, report);
  auto rows = open_out(c.out / "bench_rows.csv");
  write_report_rows(rows, report);
  for (std::string_view metric : {"time", "space"}) {
    for (std::string_view system : {"baseline", "hybrid"}) {
      auto name = std::string(metric) + "_" + std::string(system) + ".csv";
      auto series = open_out(c.out / name);
      write_series(series, report, metric, system);
    }
  }
  return report;
}

std::size_t visitor_row(const RunConfig& c, const TransactionMatrix& matrix, VisitorId& id) {
  id = c.visitor ? *c.visitor : matrix.visitor_ids().front();
  auto row = matrix.row_of(id);
  if (!row) throw Error(ErrorCode::UnknownVisitorId, "unknown visitor " + std::to_string(id));
  return *row;
}

std::vector<Recommendation> recommend_stage(const RunConfig& c, const Inputs& in,
                                            const ClusterModel& model) {
  auto rules_in = open_in(c.out / "rules_hybrid.csv");
  auto rules = read_rulebase(rules_in, in.matrix, model.k, RuleSource::Hybrid,
                             (c.out / "rules_hybrid.csv").string());
  VisitorId id = 0;
  auto row = visitor_row(c, in.matrix, id);
  auto recs = recommend(in.matrix.row(row), rules, model, in.matrix.place_ids(), c.top_n, c.alpha);
  auto out = open_out(c.out / "recommendations.csv");
  write_recommendations(out, id, recs);
  return recs;
}

void plan_stage(const RunConfig& c, const Inputs& in, std::span<const Recommendation> recs) {
  VisitorId id = 0;
  visitor_row(c, in.matrix, id);
  GeoPoint start;
  if (c.start) {
    start = *c.start;
  } else {
    auto visitors = load_visitors(c.visitors_path());
    auto it = std::find_if(visitors.begin(), visitors.end(),
                           [id](const Visitor& v) { return v.id == id; });
    if (it == visitors.end())
      throw Error(ErrorCode::UnknownVisitorId,
                  "visitor " + std::to_string(id) + " not in " + c.visitors_path().string());
    start = it->current_location;
  }
  auto plan = plan_trip(recs, in.catalog, start, c.days, c.per_day);
  auto out = open_out(c.out / "itinerary.csv");
  write_itinerary(out, plan, in.catalog);
}

}  // namespace

void cmd_gen(const RunConfig& config) {
  prepare(config);
  gen_stage(config, load_places(config.places));
}

void cmd_cluster(const RunConfig& config) {
  prepare(config);
  cluster_stage(config, load_places(config.places));
}

void cmd_mine(const RunConfig& config) {
  prepare(config);
  auto in = load_inputs(config);
  mine_stage(config, in, load_model(config, in.catalog));
}

void cmd_recommend(const RunConfig& config) {
  prepare(config);
  auto in = load_inputs(config);
  recommend_stage(config, in, load_model(config, in.catalog));
}

void cmd_plan(const RunConfig& config) {
  prepare(config);
  auto in = load_inputs(config);
  auto recs = recommend_stage(config, in, load_model(config, in.catalog));
  plan_stage(config, in, recs);
}

void cmd_eval(const RunConfig& config) {
  prepare(config);
  auto in = load_inputs(config);
  eval_stage(config, in, load_model(config, in.catalog));
}

void cmd_bench(const RunConfig& config) {
  prepare(config);
  auto in = load_inputs(config);
  auto model = load_model(config, in.catalog);
  AccuracyOptions options{config.alpha, config.min_conf};
  bench_stage(config, in, model,
              evaluate_accuracy(in.matrix, model, config.thresholds, split_spec(config), options));
}

BenchReport run_pipeline(const RunConfig& config) {
  prepare(config);
  auto catalog = load_places(config.places);
  if (config.visitors_file.empty() && config.transactions_file.empty()) gen_stage(config, catalog);
  auto in = load_inputs(config);
  auto model = cluster_stage(config, in.catalog);
  mine_stage(config, in, model);
  auto accuracy = eval_stage(config, in, model);
  auto report = bench_stage(config, in, model, std::move(accuracy));
  auto recs = recommend_stage(config, in, model);
  plan_stage(config, in, recs);
  return report;
}

}  // namespace tourrec::app
