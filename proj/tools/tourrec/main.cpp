#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app.hpp"
#include "tourrec/error.hpp"

namespace {

// Flags that map one-to-one onto config keys ('-' becomes '_').
struct Flag {
  const char* name;
  const char* help;
};
const std::vector<Flag> kScalarFlags = {
    {"seed", "Master seed (default 42)"},
    {"k", "Number of place clusters (default 10)"},
    {"min-conf", "Minimum rule confidence (default 0.5)"},
    {"alpha", "Rule weight in the hybrid score (default 0.7)"},
    {"folds", "Cross-validation folds (default 5)"},
    {"train-frac", "Per-visitor training share of the holdout split (default 0.7)"},
    {"runs", "Independent genetic-search runs (default 30)"},
    {"days", "Itinerary days (default 3)"},
    {"per-day", "Stops per itinerary day (default 4)"},
    {"out", "Output directory (default out)"},
    {"places", "Place catalog CSV (default data/iraq_places.csv)"},
    {"visitors", "Visitors to generate (default 5000)"},
    {"events", "Visit events to generate (default 10000)"},
    {"visitors-file", "Existing visitors CSV (default <out>/visitors.csv)"},
    {"transactions-file", "Existing transactions CSV (default <out>/transactions.csv)"},
    {"visitor", "Visitor id for recommend and plan (default: first visitor)"},
    {"top-n", "Recommendations to emit (default 10)"},
    {"bench-runs", "Timed samples per threshold (default 5)"},
    {"bench-min-sample-s", "Minimum seconds per timed sample (default 0.02)"},
    {"start", "Trip start as lat,lon (default: visitor location)"},
    {"category-weight", "Weight of category flags in place features (default 1)"},
    {"evo-min-support", "Genetic-search support threshold (default: lowest min-support)"},
    {"evo-population", "Genetic-search population (default 64)"},
    {"evo-generations", "Genetic-search generations (default 50)"},
    {"evo-mutation-rate", "Per-bit mutation probability (default 0.005)"},
    {"evo-crossover-rate", "Per-pair crossover probability (default 0.8)"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Hybrid clustering + association-rule tourism recommender"};
  cli.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> scalars;
  std::vector<std::string> supports;

  cli.add_option("--config", config_path, "Flat key = value config file; flags override it");
  cli.add_option("--min-support,--thresholds", supports,
                 "Minimum support threshold (repeatable or comma-separated)")
      ->delimiter(',');
  for (const auto& flag : kScalarFlags)
    cli.add_option(std::string("--") + flag.name, scalars[flag.name], flag.help);

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const tourrec::app::RunConfig&);
  };
  const Sub subs[] = {
      {"gen", "Generate synthetic visitors and transactions", tourrec::app::cmd_gen},
      {"cluster", "K-means clustering of places", tourrec::app::cmd_cluster},
      {"mine", "Mine hybrid, baseline and evolutionary rules", tourrec::app::cmd_mine},
      {"recommend", "Top-n places for one visitor", tourrec::app::cmd_recommend},
      {"plan", "Multi-day itinerary for one visitor", tourrec::app::cmd_plan},
      {"eval", "RMSE/MAE under k-fold CV and the holdout split", tourrec::app::cmd_eval},
      {"bench", "Time and space sweep over min_support", tourrec::app::cmd_bench},
      {"pipeline", "Every stage end to end", [](const tourrec::app::RunConfig& c) {
         tourrec::app::run_pipeline(c);
       }},
  };
  for (const auto& s : subs) cli.add_subcommand(s.name, s.help)->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }

  try {
    tourrec::app::RunConfig config;
    if (!config_path.empty()) tourrec::app::load_config(config_path, config);
    for (const auto& flag : kScalarFlags)
      if (cli.count(std::string("--") + flag.name))
        tourrec::app::set_key(config, flag.name, scalars[flag.name]);
    if (!supports.empty()) {
      std::string joined;
      for (const auto& s : supports) joined += (joined.empty() ? "" : ",") + s;
      tourrec::app::set_key(config, "min_support", joined);
    }
    for (const auto& s : subs)
      if (cli.got_subcommand(s.name)) s.run(config);
  } catch (const tourrec::Error& e) {
    std::fprintf(stderr, "tourrec: %s: %s\n", std::string(tourrec::to_string(e.code())).c_str(),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tourrec: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
