#include "sb2g/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sb2g {

double ClosestDistance::update(const RobotState& robot, std::span<const ObjectTruth> objects) {
  if (best_.size() != objects.size()) best_.assign(objects.size(), kClosestDistanceCap);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const double d = o.floor == robot.floor ? (o.position - robot.position).norm() : kClosestDistanceCap;
    best_[i] = std::min(best_[i], std::min(kClosestDistanceCap, d));
  }
  return sum();
}

double ClosestDistance::sum() const {
  double s = 0.0;
  for (double v : best_) s += v;
  return s;
}

double reward_cost(const RunTotals& totals, const RewardSpec& spec) {
  return totals.rewards - spec.cost_per_meter * totals.path_length - spec.cost_per_second * totals.elapsed -
         spec.stair_failure_penalty * totals.stair_failures;
}

std::vector<MetricsSample> resample(std::span<const MetricsSample> samples, double step, double until) {
  std::vector<MetricsSample> out;
  if (samples.empty()) return out;
  std::size_t j = 0;
  const int n = static_cast<int>(std::floor(until / step + 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double t = k * step;
    while (j + 1 < samples.size() && samples[j + 1].t <= t + 1e-9) ++j;
    MetricsSample s = samples[j];
    s.t = t;
    out.push_back(s);
  }
  return out;
}

std::vector<MetricsSample> trace_samples(const ParsedTrace& trace) {
  std::vector<MetricsSample> out;
  const auto& init = trace.header.at("initial");
  MetricsSample s0;
  s0.inspected = init.at("inspected").get<int>();
  s0.closest_sum = init.at("closest_sum").get<double>();
  s0.path_length = init.at("path_length").get<double>();
  s0.score = init.at("score").get<double>();
  out.push_back(s0);
  out.insert(out.end(), trace.samples.begin(), trace.samples.end());
  return out;
}

SeriesStats stats_of(std::span<const double> values) {
  SeriesStats s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  return s;
}

std::string format_number(double v) { return Json(v).dump(); }

std::string summary_csv(const std::string& method, std::span<const ParsedTrace> runs, double step) {
  std::ostringstream out;
  out << "format_version,method,t,runs";
  for (const char* m : {"inspected", "closest_sum", "path_length", "score"})
    out << ',' << m << "_mean," << m << "_min," << m << "_max";
  out << '\n';
  if (runs.empty()) return out.str();
  double budget = 0.0;
  std::vector<std::vector<MetricsSample>> series;
  for (const auto& r : runs) budget = std::max(budget, r.header.at("budget").get<double>());
  for (const auto& r : runs) {
    const auto samples = trace_samples(r);
    series.push_back(resample(samples, step, budget));
  }
  const std::size_t rows = series.front().size();
  for (std::size_t k = 0; k < rows; ++k) {
    out << kTraceFormatVersion << ',' << method << ',' << format_number(series.front()[k].t) << ',' << runs.size();
    std::vector<double> v[4];
    for (const auto& s : series) {
      v[0].push_back(s[k].inspected);
      v[1].push_back(s[k].closest_sum);
      v[2].push_back(s[k].path_length);
      v[3].push_back(s[k].score);
    }
    for (auto& col : v) {
      const auto st = stats_of(col);
      out << ',' << format_number(st.mean) << ',' << format_number(st.min) << ',' << format_number(st.max);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sb2g
