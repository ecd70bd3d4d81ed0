#ifndef SB2G_EXPERIMENT_HPP
#define SB2G_EXPERIMENT_HPP

#include "sb2g/executor.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sb2g {

constexpr double kSummaryStep = 10.0;
constexpr const char* kWorkersEnv = "SB2G_WORKERS";

/// "a..b" (inclusive) or a single seed. Throws UsageError.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

/// Worker pool size: SB2G_WORKERS when set, else the hardware concurrency.
int worker_count();

struct ExperimentResult {
  std::string method;
  std::vector<std::uint64_t> seeds;
  std::vector<RunResult> runs;  // in seed order
  std::string summary;          // summary.csv contents
  std::string runs_table;       // runs.csv contents
};

/// Runs every seed on its own simulation, `workers` at a time. With a
/// non-empty `out`, writes seed-N.jsonl, seed-N.csv, runs.csv and
/// summary.csv there.
ExperimentResult run_experiment(const WorldScenario& scenario, Method method, const std::vector<std::uint64_t>& seeds,
                                double budget, const std::filesystem::path& out = {}, int workers = 0);

/// Per-run finals as written to runs.csv.
struct RunRow {
  std::string method;
  std::uint64_t seed = 0;
  std::string reason;
  long ticks = 0;
  int inspected = 0;
  double closest_sum = 0.0;
  double path_length = 0.0;
  double score = 0.0;
  std::string hash;
};

std::string runs_csv(const std::string& method, const std::vector<std::uint64_t>& seeds,
                     const std::vector<RunResult>& runs);
std::vector<RunRow> parse_runs_csv(const std::string& text);

/// Per-tick series of one trace, resampled at `step`.
std::string series_csv(const ParsedTrace& trace, double step);

struct RunSet {
  std::string name;  // method, or the directory when two sets share one
  std::vector<RunRow> rows;
};

/// Reads runs.csv from an experiment directory.
RunSet load_run_set(const std::filesystem::path& dir);

enum class Ordering { first_better, second_better, inconclusive };

struct PairedMetric {
  std::vector<double> deltas;  // first minus second, per seed
  double mean_delta = 0.0;
  int first_wins = 0;
  int second_wins = 0;
  Ordering ordering = Ordering::inconclusive;
};

struct PairedComparison {
  std::string first;
  std::string second;
  PairedMetric inspected;
  PairedMetric score;
};

struct CompareReport {
  std::vector<std::uint64_t> seeds;
  std::vector<PairedComparison> pairs;
  std::vector<std::string> ranking;  // empty unless the orderings chain
  int required = 0;                  // seeds an ordering must hold in
};

/// Paired comparison of final inspected-count and score. Throws UsageError
/// for fewer than two sets, mismatched seeds, or (strict) a single seed.
CompareReport compare(const std::vector<RunSet>& sets, bool strict);

std::string format_report(const CompareReport& report);

}  // namespace sb2g

#endif  // SB2G_EXPERIMENT_HPP
