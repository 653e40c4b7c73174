#include "tourrec/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "tourrec/error.hpp"
#include "tourrec/rng.hpp"

namespace tourrec {

double reduction_rate(double baseline, double proposed) {
  if (!(baseline > 0.0)) throw Error(ErrorCode::ZeroBaseline, "baseline must be positive");
  return 100.0 * (baseline - proposed) / baseline;
}

double mean_reduction(std::span<const double> rates) {
  if (rates.empty()) throw Error(ErrorCode::EmptyRows, "no rows to average");
  double sum = 0.0;
  for (double r : rates) sum += r;
  return sum / static_cast<double>(rates.size());
}

namespace {

void check_lengths(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size())
    throw Error(ErrorCode::LengthMismatch, "prediction and ground-truth lengths differ");
  if (predicted.empty()) throw Error(ErrorCode::Empty, "no predictions");
}

}  // namespace

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    double d = predicted[i] - actual[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

double mae(std::span<const double> predicted, std::span<const double> actual) {
  check_lengths(predicted, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::abs(predicted[i] - actual[i]);
  return sum / static_cast<double>(predicted.size());
}

std::string format_percent(double pct) {
  // Nudge by 1e-7 so values like 25.899 stored as 25.8989999... keep their digits.
  double scaled = pct * 1000.0;
  scaled = scaled >= 0 ? std::floor(scaled + 1e-7) : std::ceil(scaled - 1e-7);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", scaled / 1000.0);
  return buf;
}

std::string format_sig6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<AccuracyRow> evaluate_splits(const TransactionMatrix& matrix, const ClusterModel& model,
                                         std::span<const double> thresholds,
                                         const std::vector<TrainTest>& splits, std::uint64_t seed,
                                         const AccuracyOptions& options) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");
  std::vector<AccuracyRow> rows(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) rows[t].min_supp = thresholds[t];

  for (std::size_t f = 0; f < splits.size(); ++f) {
    const auto& split = splits[f];
    if (split.test.empty()) throw Error(ErrorCode::Empty, "split holds out no cells");

    // One unvisited place per held-out positive, fixed across thresholds.
    Rng rng(stage_seed(seed, "negatives/" + std::to_string(f)));
    std::vector<Cell> negatives;
    for (const auto& cell : split.test) {
      const auto& full = matrix.row(cell.row);
      if (full.count() == matrix.items()) continue;
      ItemId q;
      do {
        q = static_cast<ItemId>(rng.below(matrix.items()));
      } while (full.test(q));
      negatives.push_back({cell.row, q});
    }

    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      auto baseline = mine_baseline(split.train, thresholds[t], options.min_conf);
      auto hybrid = mine_hybrid(split.train, model, thresholds[t], options.min_conf);
      Scorer base_scorer(baseline, model, 1.0);
      Scorer hybrid_scorer(hybrid, model, options.alpha);

      std::vector<double> actual, pred_base, pred_hybrid;
      auto add = [&](const Cell& cell, double truth) {
        const auto& history = split.train.row(cell.row);
        actual.push_back(truth);
        pred_base.push_back(base_scorer.score(history, cell.item).score);
        pred_hybrid.push_back(hybrid_scorer.score(history, cell.item).score);
      };
      for (const auto& cell : split.test) add(cell, 1.0);
      for (const auto& cell : negatives) add(cell, 0.0);

      FoldMetrics m;
      m.rmse_baseline = rmse(pred_base, actual);
      m.rmse_hybrid = rmse(pred_hybrid, actual);
      m.mae_baseline = mae(pred_base, actual);
      m.mae_hybrid = mae(pred_hybrid, actual);
      m.predictions = actual.size();
      rows[t].folds.push_back(m);
    }
  }

  for (auto& row : rows) {
    auto k = static_cast<double>(row.folds.size());
    for (const auto& m : row.folds) {
      row.rmse_baseline += m.rmse_baseline / k;
      row.rmse_hybrid += m.rmse_hybrid / k;
      row.mae_baseline += m.mae_baseline / k;
      row.mae_hybrid += m.mae_hybrid / k;
    }
  }
  return rows;
}

}  // namespace

std::vector<AccuracyRow> evaluate_accuracy(const TransactionMatrix& matrix,
                                           const ClusterModel& model,
                                           std::span<const double> thresholds,
                                           const SplitSpec& spec, const AccuracyOptions& options) {
  return evaluate_splits(matrix, model, thresholds, kfold(matrix, spec), spec.seed, options);
}

std::vector<AccuracyRow> evaluate_holdout(const TransactionMatrix& matrix,
                                          const ClusterModel& model,
                                          std::span<const double> thresholds,
                                          const SplitSpec& spec, const AccuracyOptions& options) {
  std::vector<TrainTest> splits{split_train_test(matrix, spec)};
  return evaluate_splits(matrix, model, thresholds, splits, spec.seed, options);
}

// ---------------------------------------------------------------------------

double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::Empty, "median of nothing");
  std::sort(values.begin(), values.end());
  auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

template <typename Fn>
double timed_sample(const BenchClock& clock, double min_seconds, Fn&& fn) {
  const double t0 = clock();
  std::size_t calls = 0;
  double elapsed = 0.0;
  do {
    fn();
    ++calls;
    elapsed = clock() - t0;
  } while (elapsed < min_seconds);
  return elapsed / static_cast<double>(calls);
}

std::uint64_t total(const std::vector<std::uint64_t>& v) {
  std::uint64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

}  // namespace

BenchReport run_benchmark(const TransactionMatrix& matrix, const ClusterModel& model,
                          std::span<const double> thresholds, const BenchOptions& options) {
  if (options.runs < 1) throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");
  BenchReport report;
  std::vector<double> time_rates, space_rates;
  for (double th : thresholds) {
    BenchRow row;
    row.min_supp = th;
    auto baseline = mine_baseline(matrix, th, options.min_conf);
    auto hybrid = mine_hybrid(matrix, model, th, options.min_conf);
    row.baseline_bytes = baseline.mining_stats().candidate_bytes_peak;
    row.hybrid_bytes = hybrid.mining_stats().candidate_bytes_peak;
    row.baseline_candidates = total(baseline.mining_stats().candidates_per_level);
    row.hybrid_candidates = total(hybrid.mining_stats().candidates_per_level);
    row.baseline_rules = baseline.rule_count();
    row.hybrid_rules = hybrid.rule_count();

    std::vector<double> tb, th_samples;
    std::size_t sink = 0;
    for (std::size_t r = 0; r < options.runs; ++r) {
      tb.push_back(timed_sample(options.clock, options.min_sample_seconds, [&] {
        sink += mine_baseline(matrix, th, options.min_conf).rule_count();
      }));
      th_samples.push_back(timed_sample(options.clock, options.min_sample_seconds, [&] {
        sink += mine_hybrid(matrix, model, th, options.min_conf).rule_count();
      }));
    }
    (void)sink;
    row.baseline_time_s = median(tb);
    row.hybrid_time_s = median(th_samples);
    row.time_reduction_pct =
        row.baseline_time_s > 0 ? reduction_rate(row.baseline_time_s, row.hybrid_time_s) : 0.0;
    row.space_reduction_pct =
        row.baseline_bytes > 0 ? reduction_rate(static_cast<double>(row.baseline_bytes),
                                                static_cast<double>(row.hybrid_bytes))
                               : 0.0;
    time_rates.push_back(row.time_reduction_pct);
    space_rates.push_back(row.space_reduction_pct);
    report.rows.push_back(row);
  }
  report.mean_time_reduction_pct = mean_reduction(time_rates);
  report.mean_space_reduction_pct = mean_reduction(space_rates);
  report.environment = describe_host();
  report.peak_rss_kb = peak_rss_kb();
  return report;
}

std::string describe_host() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream out;
  out << cpu << "; " << std::thread::hardware_concurrency() << " hardware threads; compiler "
#if defined(__clang__)
      << "clang " << __clang_version__;
#elif defined(__GNUC__)
      << "gcc " << __VERSION__;
#else
      << "unknown";
#endif
  out << "; timing single-threaded";
  return out.str();
}

std::uint64_t peak_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      std::uint64_t kb = 0;
      fields >> kb;
      return kb;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

void write_report_text(std::ostream& out, const BenchReport& report) {
  char buf[256];
  out << "Minimum-support sweep: baseline (single-pass Apriori) vs hybrid (per-cluster Apriori)\n\n";

  out << "## Execution time\n";
  out << "min_supp  baseline_s    hybrid_s      time_reduction_pct\n";
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-9.2f %-13s %-13s %s%%\n", r.min_supp,
                  format_sig6(r.baseline_time_s).c_str(), format_sig6(r.hybrid_time_s).c_str(),
                  format_percent(r.time_reduction_pct).c_str());
    out << buf;
  }
  out << "mean time reduction: " << format_percent(report.mean_time_reduction_pct) << "%\n\n";

  out << "## Space consumption (candidate bytes)\n";
  out << "min_supp  baseline_bytes  hybrid_bytes    space_reduction_pct\n";
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-9.2f %-15llu %-15llu %s%%\n", r.min_supp,
                  static_cast<unsigned long long>(r.baseline_bytes),
                  static_cast<unsigned long long>(r.hybrid_bytes),
                  format_percent(r.space_reduction_pct).c_str());
    out << buf;
  }
  out << "mean space reduction: " << format_percent(report.mean_space_reduction_pct) << "%\n\n";

  out << "## Candidates and rules\n";
  out << "min_supp  baseline_candidates  hybrid_candidates  baseline_rules  hybrid_rules\n";
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-9.2f %-20llu %-18llu %-15zu %zu\n", r.min_supp,
                  static_cast<unsigned long long>(r.baseline_candidates),
                  static_cast<unsigned long long>(r.hybrid_candidates), r.baseline_rules,
                  r.hybrid_rules);
    out << buf;
  }
  out << '\n';

  if (!report.accuracy.empty()) {
    out << "## Accuracy (fold means)\n";
    out << "min_supp  rmse_baseline  rmse_hybrid  mae_baseline  mae_hybrid\n";
    for (const auto& a : report.accuracy) {
      std::snprintf(buf, sizeof buf, "%-9.2f %-14s %-12s %-13s %s\n", a.min_supp,
                    format_sig6(a.rmse_baseline).c_str(), format_sig6(a.rmse_hybrid).c_str(),
                    format_sig6(a.mae_baseline).c_str(), format_sig6(a.mae_hybrid).c_str());
      out << buf;
    }
    out << '\n';
  }

  out << "## Host\n" << report.environment << '\n';
  out << "peak_rss_kb: " << report.peak_rss_kb << '\n';
}

void write_report_rows(std::ostream& out, const BenchReport& report) {
  out << "metric,min_supp,system,value\n";
  auto row = [&](std::string_view metric, double supp, std::string_view system, const std::string& v) {
    char s[32];
    std::snprintf(s, sizeof s, "%.2f", supp);
    out << metric << ',' << s << ',' << system << ',' << v << '\n';
  };
  for (const auto& r : report.rows) {
    row("time_s", r.min_supp, "baseline", format_sig6(r.baseline_time_s));
    row("time_s", r.min_supp, "hybrid", format_sig6(r.hybrid_time_s));
    row("time_reduction_pct", r.min_supp, "hybrid", format_percent(r.time_reduction_pct));
    row("candidate_bytes", r.min_supp, "baseline", std::to_string(r.baseline_bytes));
    row("candidate_bytes", r.min_supp, "hybrid", std::to_string(r.hybrid_bytes));
    row("space_reduction_pct", r.min_supp, "hybrid", format_percent(r.space_reduction_pct));
    row("candidates", r.min_supp, "baseline", std::to_string(r.baseline_candidates));
    row("candidates", r.min_supp, "hybrid", std::to_string(r.hybrid_candidates));
    row("rules", r.min_supp, "baseline", std::to_string(r.baseline_rules));
    row("rules", r.min_supp, "hybrid", std::to_string(r.hybrid_rules));
  }
  for (const auto& a : report.accuracy) {
    row("rmse", a.min_supp, "baseline", format_sig6(a.rmse_baseline));
    row("rmse", a.min_supp, "hybrid", format_sig6(a.rmse_hybrid));
    row("mae", a.min_supp, "baseline", format_sig6(a.mae_baseline));
    row("mae", a.min_supp, "hybrid", format_sig6(a.mae_hybrid));
  }
}

void write_series(std::ostream& out, const BenchReport& report, std::string_view metric,
                  std::string_view system) {
  if (metric != "time" && metric != "space")
    throw Error(ErrorCode::InvalidArgument, "series metric must be time or space");
  if (system != "baseline" && system != "hybrid")
    throw Error(ErrorCode::InvalidArgument, "series system must be baseline or hybrid");
  bool base = system == "baseline";
  out << "min_supp," << (metric == "time" ? "seconds" : "candidate_bytes") << '\n';
  char s[32];
  for (const auto& r : report.rows) {
    std::snprintf(s, sizeof s, "%.2f", r.min_supp);
    out << s << ',';
    if (metric == "time")
      out << format_sig6(base ? r.baseline_time_s : r.hybrid_time_s);
    else
      out << (base ? r.baseline_bytes : r.hybrid_bytes);
    out << '\n';
  }
}

void write_accuracy(std::ostream& out, std::span<const AccuracyRow> rows) {
  out << "min_supp,fold,rmse_baseline,rmse_hybrid,mae_baseline,mae_hybrid\n";
  char s[32];
  for (const auto& a : rows) {
    std::snprintf(s, sizeof s, "%.2f", a.min_supp);
    for (std::size_t f = 0; f < a.folds.size(); ++f) {
      const auto& m = a.folds[f];
      out << s << ',' << f + 1 << ',' << csv::fixed6(m.rmse_baseline) << ','
          << csv::fixed6(m.rmse_hybrid) << ',' << csv::fixed6(m.mae_baseline) << ','
          << csv::fixed6(m.mae_hybrid) << '\n';
    }
    out << s << ",mean," << csv::fixed6(a.rmse_baseline) << ',' << csv::fixed6(a.rmse_hybrid)
        << ',' << csv::fixed6(a.mae_baseline) << ',' << csv::fixed6(a.mae_hybrid) << '\n';
  }
}

}  // namespace tourrec
