#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tourrec/clustering.hpp"
#include "tourrec/data_model.hpp"
#include "tourrec/hybrid.hpp"

namespace tourrec {

/// Thresholds of the minimum-support sweep.
inline const std::vector<double> kDefaultThresholds = {0.02, 0.04, 0.06, 0.08, 0.10};

/// 100 * (baseline - proposed) / baseline.
double reduction_rate(double baseline, double proposed);

/// Arithmetic mean of per-row reduction rates.
double mean_reduction(std::span<const double> rates);

double rmse(std::span<const double> predicted, std::span<const double> actual);
double mae(std::span<const double> predicted, std::span<const double> actual);

/// Percent with three decimals, truncated toward zero (e.g. 36.8946 -> "36.894").
std::string format_percent(double pct);
/// Six significant digits.
std::string format_sig6(double value);

// ---------------------------------------------------------------------------
// Accuracy
// ---------------------------------------------------------------------------

struct FoldMetrics {
  double rmse_baseline = 0, rmse_hybrid = 0, mae_baseline = 0, mae_hybrid = 0;
  std::size_t predictions = 0;
};

struct AccuracyRow {
  double min_supp = 0;
  double rmse_baseline = 0, rmse_hybrid = 0, mae_baseline = 0, mae_hybrid = 0;
  std::vector<FoldMetrics> folds;
};

struct AccuracyOptions {
  double alpha = 0.7;
  double min_conf = 0.5;
};

/// k-fold evaluation: for each fold and threshold, both systems are mined on
/// the fold's training matrix and scored on the held-out positives plus one
/// seeded unvisited place per positive (actual 0). Reported values are fold
/// means.
std::vector<AccuracyRow> evaluate_accuracy(const TransactionMatrix& matrix,
                                           const ClusterModel& model,
                                           std::span<const double> thresholds,
                                           const SplitSpec& spec,
                                           const AccuracyOptions& options = {});

/// Same protocol on the single per-visitor train/test split.
std::vector<AccuracyRow> evaluate_holdout(const TransactionMatrix& matrix,
                                          const ClusterModel& model,
                                          std::span<const double> thresholds,
                                          const SplitSpec& spec,
                                          const AccuracyOptions& options = {});

// ---------------------------------------------------------------------------
// Time / space benchmark
// ---------------------------------------------------------------------------

struct BenchRow {
  double min_supp = 0;
  double baseline_time_s = 0;
  double hybrid_time_s = 0;
  double time_reduction_pct = 0;
  std::uint64_t baseline_bytes = 0;
  std::uint64_t hybrid_bytes = 0;
  double space_reduction_pct = 0;
  std::uint64_t baseline_candidates = 0;
  std::uint64_t hybrid_candidates = 0;
  std::size_t baseline_rules = 0;
  std::size_t hybrid_rules = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<AccuracyRow> accuracy;  // may be empty
  double mean_time_reduction_pct = 0;
  double mean_space_reduction_pct = 0;
  std::string environment;
  std::uint64_t peak_rss_kb = 0;  // informational
};

/// Monotonic seconds; injectable for tests.
using BenchClock = std::function<double()>;

double steady_seconds();

struct BenchOptions {
  std::size_t runs = 5;
  /// Each sample repeats the mining call until this much time has passed and
  /// reports the per-call mean. 0 = one call per sample.
  double min_sample_seconds = 0.0;
  double min_conf = 0.5;
  BenchClock clock = steady_seconds;
};

/// Median of `values` (mean of the two middle values for even counts).
double median(std::vector<double> values);

/// Times mine_baseline and mine_hybrid at each threshold (median of `runs`
/// samples, interleaved) and records candidate-byte accounting.
BenchReport run_benchmark(const TransactionMatrix& matrix, const ClusterModel& model,
                          std::span<const double> thresholds, const BenchOptions& options = {});

/// Free-text host description (CPU, cores, compiler).
std::string describe_host();
/// Peak resident set of this process in KiB, 0 when unavailable.
std::uint64_t peak_rss_kb();

/// Human-readable tables: execution time, space, accuracy, host.
void write_report_text(std::ostream& out, const BenchReport& report);
/// Flat `metric,min_supp,system,value` rows.
void write_report_rows(std::ostream& out, const BenchReport& report);
/// Two-column `min_supp,value` series; metric is "time" or "space", system
/// "baseline" or "hybrid".
void write_series(std::ostream& out, const BenchReport& report, std::string_view metric,
                  std::string_view system);
void write_accuracy(std::ostream& out, std::span<const AccuracyRow> rows);

}  // namespace tourrec
