#ifndef SB2G_METRICS_HPP
#define SB2G_METRICS_HPP

#include "sb2g/config.hpp"
#include "sb2g/trace.hpp"
#include "sb2g/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace sb2g {

constexpr double kClosestDistanceCap = 5.0;

/// Running minimum of the capped true distance to each object. Objects on
/// another floor count as the cap.
class ClosestDistance {
 public:
  ClosestDistance() = default;
  explicit ClosestDistance(std::size_t objects) : best_(objects, kClosestDistanceCap) {}

  double update(const RobotState& robot, std::span<const ObjectTruth> objects);
  double sum() const;
  const std::vector<double>& per_object() const { return best_; }

 private:
  std::vector<double> best_;
};

struct RunTotals {
  double rewards = 0.0;
  double path_length = 0.0;
  double elapsed = 0.0;
  int stair_failures = 0;
};

/// Task rewards minus travel, time and stair-failure costs.
double reward_cost(const RunTotals& totals, const RewardSpec& spec);

/// Values at t = 0, step, 2*step, ... up to `until`, carrying the last
/// sample forward once the run has ended.
std::vector<MetricsSample> resample(std::span<const MetricsSample> samples, double step, double until);

/// Samples of a parsed trace, including the initial state at t = 0.
std::vector<MetricsSample> trace_samples(const ParsedTrace& trace);

struct SeriesStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SeriesStats stats_of(std::span<const double> values);

/// Summary CSV over matched runs of one method, at `step` resolution.
std::string summary_csv(const std::string& method, std::span<const ParsedTrace> runs, double step);

std::string format_number(double v);

}  // namespace sb2g

#endif  // SB2G_METRICS_HPP
