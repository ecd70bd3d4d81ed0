#include "sb2g/active_search.hpp"

#include "sb2g/entropy.hpp"
#include "sb2g/rng.hpp"

#include <array>
#include <limits>

namespace sb2g {

LabelVector detection_vector(const RobotState& robot, const Vec2& target, int target_floor,
                             const SensorModel& sensor, const OccupancyGrid* known) {
  const int n = sensor.labels.size();
  LabelVector pd = LabelVector::Zero(n);
  if (!in_field_of_view(robot, target, target_floor, sensor.fov_half_angle, sensor.max_range, known, true))
    return pd;
  const double d = (target - robot.position).norm();
  for (int l = 0; l < n; ++l) {
    const auto& info = sensor.labels.at(SemanticClassId{l});
    pd(l) = info.base_detection * std::exp(-std::abs(info.optimal_detection_distance - d) / info.detection_decay);
  }
  return pd;
}

namespace {

double uniform(SplitMix64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

double gaussian(SplitMix64& g) {
  // Box-Muller on a private stream keeps the tree independent of the
  // standard library's distribution internals.
  const double u1 = 1.0 - uniform(g);
  const double u2 = uniform(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int draw_index(SplitMix64& g, const LabelVector& w, double total) {
  const double u = uniform(g) * total;
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < w.size(); ++i) {
    if (w(i) <= 0.0) continue;
    last = i;
    acc += w(i);
    if (u < acc) return i;
  }
  return last;
}

double heading_to(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  return d.squaredNorm() > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;
}

}  // namespace

void sample_candidates(const ObjectBelief& target, const RobotState& robot, const SearchWorld& world,
                       std::uint64_t seed, std::vector<Pose2>& poses, std::vector<bool>& valid) {
  const auto& cfg = world.config;
  poses.clear();
  valid.clear();
  poses.push_back({robot.position, heading_to(robot.position, target.mean)});
  valid.push_back(true);
  SplitMix64 g(mix_seed(seed, 0));
  for (int i = 1; i < cfg.action_samples; ++i) {
    const double r = cfg.min_displacement + (cfg.max_displacement - cfg.min_displacement) * uniform(g);
    const double phi = (2.0 * uniform(g) - 1.0) * std::numbers::pi;
    const Vec2 p = robot.position + r * Vec2(std::cos(phi), std::sin(phi));
    poses.push_back({p, heading_to(p, target.mean)});
    valid.push_back(world.nav->passable(p) && world.nav->segment_passable(robot.position, p));
  }
}

void sample_outcomes(const ObjectBelief& target, const RobotState& pose, const SearchWorld& world,
                     std::uint64_t seed, std::vector<SearchOutcome>& out, bool leaf) {
  out.clear();
  const auto& sensor = *world.sensor;
  const LabelVector pd = detection_vector(pose, target.mean, target.floor, sensor, world.known);
  const LabelVector joint = target.labels.cwiseProduct(pd);
  const double p_det = joint.sum();
  const double w_miss = 1.0 - p_det;
  if (w_miss > 0.0) {
    SearchOutcome miss{w_miss, target};
    if (p_det > 0.0) {
      LabelVector w = target.labels - joint;
      miss.belief.labels = w / w.sum();
    }
    out.push_back(std::move(miss));
  }
  if (!(p_det > 0.0)) return;

  const int samples = world.config.outcome_samples;
  const double weight = p_det / samples;
  const Eigen::LLT<Mat2> llt(target.cov);
  const bool factored = llt.info() == Eigen::Success;
  const double range = (target.mean - pose.position).norm();
  const int n = sensor.labels.size();
  std::array<ScoreDensity, kMaxLabels> density;
  if (leaf)
    for (int l = 0; l < n; ++l)
      density[static_cast<std::size_t>(l)] = ScoreDensity(sensor.labels.at(SemanticClassId{l}).score, range, sensor.noise.score_std);
  for (int k = 0; k < samples; ++k) {
    SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(k) + 1));
    const int truth = draw_index(g, joint, p_det);
    const auto& info = sensor.labels.at(SemanticClassId{truth});
    // Object position drawn from the prior, detection noise on top.
    Vec2 y = target.mean;
    const Vec2 n1(gaussian(g), gaussian(g));
    if (factored) y += llt.matrixL() * n1;
    Observation z;
    z.object_id = target.id;
    z.label = SemanticClassId{draw_index(g, sensor.noise.confusion.row(truth).transpose(), 1.0)};
    z.score = sample_score(info.score, (y - pose.position).norm(), sensor.noise.score_std, g);
    if (leaf) {
      // Only the label distribution and position covariance reach the
      // objective, and neither depends on the measured pose.
      SearchOutcome o{weight, target};
      const auto r = pose_measurement_covariance(pose, target.mean, sensor.noise, sensor.labels.at(z.label).gamma);
      kalman_position_update(o.belief.mean, o.belief.cov, target.mean, r.position);
      LabelVector w(n);
      for (int l = 0; l < n; ++l) {
        const double c = sensor.noise.confusion(l, z.label.index);
        w(l) = c == 0.0 ? 0.0 : target.labels(l) * c * density[static_cast<std::size_t>(l)](z.score);
      }
      const double total = w.sum();
      o.belief.labels = total > 0.0 ? LabelVector(w / total) : uniform_labels(n);
      out.push_back(std::move(o));
      continue;
    }
    const auto r = pose_measurement_covariance(pose, y, sensor.noise, info.gamma);
    z.position = y + Vec2(std::sqrt(r.position(0, 0)) * gaussian(g), std::sqrt(r.position(1, 1)) * gaussian(g));
    z.orientation = wrap_angle(target.heading_mean + std::sqrt(target.heading_var + r.orientation) * gaussian(g));
    out.push_back({weight, update_object(target, z, pose, sensor).belief});
  }
}

namespace {

class TreeSearch {
 public:
  TreeSearch(const SearchWorld& world, SearchMethod method) : world_(world), method_(method) {
    const int depth = world.config.steps;
    poses_.resize(static_cast<std::size_t>(depth));
    valid_.resize(static_cast<std::size_t>(depth));
    outcomes_.resize(static_cast<std::size_t>(depth));
  }

  struct Value {
    double value;
    bool exact;
  };

  // Exact optimum when it lies below `bound`; otherwise any value >= bound
  // flagged inexact. The exhaustive method always passes an infinite bound.
  Value evaluate(const ObjectBelief& b, const RobotState& robot, int depth, std::uint64_t seed, double bound,
                 int* best_action) {
    ++stats.nodes;
    if (depth == world_.config.steps) return {entropy_objective(b, world_.config.entropy_weight), true};

    const auto d = static_cast<std::size_t>(depth);
    sample_candidates(b, robot, world_, seed, poses_[d], valid_[d]);
    const bool bnb = method_ == SearchMethod::branch_and_bound;
    constexpr double inf = std::numeric_limits<double>::infinity();
    double best = inf;
    int best_index = -1;
    const int count = static_cast<int>(poses_[d].size());
    for (int a = 0; a < count; ++a) {
      if (!valid_[d][static_cast<std::size_t>(a)]) continue;
      RobotState next = robot;
      next.position = poses_[d][static_cast<std::size_t>(a)].position;
      next.heading = poses_[d][static_cast<std::size_t>(a)].heading;
      const std::uint64_t action_seed = mix_seed(seed, static_cast<std::uint64_t>(a) + 1);
      sample_outcomes(b, next, world_, action_seed, outcomes_[d], depth + 1 == world_.config.steps);
      // Children only touch deeper scratch levels.
      const auto& outcomes = outcomes_[d];
      double acc = 0.0;
      bool cut = false;
      for (std::size_t o = 0; o < outcomes.size(); ++o) {
        const double limit = bnb ? std::min(best, bound) : inf;
        const double w = outcomes[o].weight;
        double child_bound = inf;
        if (bnb && limit < inf) child_bound = (limit - acc + 1e-9) / w;
        const Value v = evaluate(outcomes[o].belief, next, depth + 1, mix_seed(action_seed, o + 1), child_bound,
                                 nullptr);
        if (!v.exact) {
          cut = true;
          break;
        }
        acc += w * v.value;
        if (bnb && acc >= limit) {
          cut = true;
          break;
        }
      }
      if (cut) {
        ++stats.pruned;
        continue;
      }
      if (acc < best) {
        best = acc;
        best_index = a;
      }
    }
    if (best_action) *best_action = best_index;
    if (best < bound) return {best, true};
    return {bound, false};
  }

  SearchStats stats;

 private:
  const SearchWorld& world_;
  SearchMethod method_;
  std::vector<std::vector<Pose2>> poses_;
  std::vector<std::vector<bool>> valid_;
  std::vector<std::vector<SearchOutcome>> outcomes_;
};

}  // namespace

SearchPlan plan_active_search(const ObjectBelief& target, const RobotState& robot, const SearchWorld& world,
                              std::uint64_t seed, SearchMethod method) {
  SearchPlan plan;
  sample_candidates(target, robot, world, seed, plan.candidates, plan.valid);
  int movable = 0;
  for (std::size_t i = 1; i < plan.valid.size(); ++i) movable += plan.valid[i] ? 1 : 0;
  plan.recovery = movable == 0;

  TreeSearch search(world, method);
  int best = 0;
  const auto v = search.evaluate(target, robot, 0, seed, std::numeric_limits<double>::infinity(), &best);
  plan.best = best < 0 ? 0 : best;
  plan.value = v.value;
  plan.stats = search.stats;
  return plan;
}

}  // namespace sb2g
