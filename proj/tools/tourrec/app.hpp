#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tourrec/data_model.hpp"
#include "tourrec/eval.hpp"
#include "tourrec/evolution.hpp"

namespace tourrec::app {

/// Every knob of a run. Serialised as flat `key = value` lines.
struct RunConfig {
  std::filesystem::path places = "data/iraq_places.csv";
  /// Inputs for the later stages; empty means `<out>/visitors.csv` and
  /// `<out>/transactions.csv`, generated by `pipeline` when absent.
  std::filesystem::path visitors_file;
  std::filesystem::path transactions_file;
  std::filesystem::path out = "out";

  std::uint64_t seed = 42;
  std::size_t visitors = 5000;
  std::size_t events = 10000;

  std::size_t k = 10;
  double category_weight = 1.0;

  std::vector<double> thresholds = kDefaultThresholds;
  double min_conf = 0.5;
  double alpha = 0.7;

  std::uint32_t folds = 5;
  double train_fraction = 0.70;

  EvoParams evo;
  /// Support threshold of the genetic search; 0 uses the lowest threshold.
  double evo_min_support = 0.0;

  std::size_t bench_runs = 5;
  double bench_min_sample_s = 0.02;

  /// Visitor for recommend/plan; unset picks the first visitor.
  std::optional<VisitorId> visitor;
  std::size_t top_n = 10;
  std::size_t days = 3;
  std::size_t per_day = 4;
  /// Trip start; unset uses the visitor's current location.
  std::optional<GeoPoint> start;

  std::filesystem::path visitors_path() const;
  std::filesystem::path transactions_path() const;

  /// Throws Error(InvalidArgument) on out-of-range values.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

/// Applies `key = value` lines onto `config`. Blank lines and `#` comments
/// are skipped; unknown keys and bad values throw Error(InvalidArgument).
void parse_config(std::istream& in, RunConfig& config, std::string_view source = "<config>");
void load_config(const std::filesystem::path& path, RunConfig& config);
void write_config(std::ostream& out, const RunConfig& config);

/// Sets one key from its text form; same rules as parse_config.
void set_key(RunConfig& config, std::string_view key, std::string_view value);

/// Subcommands. Each reads its inputs from the configured paths and writes
/// its outputs into `config.out`.
void cmd_gen(const RunConfig& config);
void cmd_cluster(const RunConfig& config);
void cmd_mine(const RunConfig& config);
void cmd_recommend(const RunConfig& config);
void cmd_plan(const RunConfig& config);
void cmd_eval(const RunConfig& config);
void cmd_bench(const RunConfig& config);
/// gen (when the inputs are missing), cluster, mine, eval, bench,
/// recommend, plan. Returns the benchmark report.
BenchReport run_pipeline(const RunConfig& config);

}  // namespace tourrec::app
