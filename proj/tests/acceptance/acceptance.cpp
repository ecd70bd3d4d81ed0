// One PASS/FAIL line per criterion; nonzero exit when any fails.
#include "sb2g/active_search.hpp"
#include "sb2g/belief_filter.hpp"
#include "sb2g/entropy.hpp"
#include "sb2g/experiment.hpp"
#include "sb2g/metrics.hpp"
#include "sb2g/scenario.hpp"
#include "sb2g/session.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace sb2g;

namespace {

using Clock = std::chrono::steady_clock;

std::string scenario_path(const std::string& name) { return std::string(SB2G_SCENARIO_DIR) + "/" + name + ".json"; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || elapsed < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  char time[64];
  if (limit_s > 0.0)
    std::snprintf(time, sizeof time, "%.2f s (limit %.0f s)", elapsed, limit_s);
  else
    std::snprintf(time, sizeof time, "%.2f s", elapsed);
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "; " << time << std::endl;
}

// ---------------------------------------------------------------------------
// Oracles, written without the library's filter code.

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double truncated_normal_pdf(double s, double mean, double sd) {
  if (s < 0.0 || s > 1.0) return 0.0;
  const double mass = phi((1.0 - mean) / sd) - phi((0.0 - mean) / sd);
  const double x = (s - mean) / sd;
  return std::exp(-0.5 * x * x) / (sd * std::sqrt(2.0 * std::numbers::pi)) / mass;
}

std::vector<double> brute_force_posterior(const std::vector<double>& prior, const std::vector<std::vector<double>>& c,
                                          const std::vector<ScoreParams>& score, double score_std, int detected,
                                          double s, double d) {
  const std::size_t n = prior.size();
  std::vector<double> joint(n);
  double evidence = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double mean = score[l].peak * std::exp(-std::abs(score[l].optimal_distance - d) / score[l].decay);
    joint[l] = prior[l] * c[l][static_cast<std::size_t>(detected)] * truncated_normal_pdf(s, mean, score_std);
    evidence += joint[l];
  }
  if (evidence == 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  for (auto& j : joint) j /= evidence;
  return joint;
}

struct GridMoments {
  double mean = 0.0, var = 0.0;
};

// Prior N(m, s2) on a 201-cell grid, multiplied by the N(z; x, r2) likelihood.
GridMoments grid_filter(double m, double s2, double z, double r2) {
  constexpr int kCells = 201;
  const double half = 6.0 * std::sqrt(s2);
  const double h = 2.0 * half / (kCells - 1);
  std::vector<double> x(kCells), w(kCells);
  double total = 0.0;
  for (int i = 0; i < kCells; ++i) {
    x[i] = m - half + h * i;
    w[i] = std::exp(-0.5 * (x[i] - m) * (x[i] - m) / s2) * std::exp(-0.5 * (z - x[i]) * (z - x[i]) / r2);
    total += w[i];
  }
  GridMoments g;
  for (int i = 0; i < kCells; ++i) g.mean += w[i] * x[i] / total;
  for (int i = 0; i < kCells; ++i) g.var += w[i] * (x[i] - g.mean) * (x[i] - g.mean) / total;
  return g;
}

SensorModel random_sensor(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LabelInfo> infos;
  for (int l = 0; l < n; ++l) {
    LabelInfo info;
    info.name = "class" + std::to_string(l);
    info.gamma = 0.5 + u(g);
    info.score = {0.3 + 0.7 * u(g), 0.5 + 3.0 * u(g), 0.5 + 5.0 * u(g)};
    infos.push_back(info);
  }
  SensorModel s;
  s.labels = LabelRegistry(infos);
  s.noise.confusion = Eigen::MatrixXd(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      // Occasional exact zeros exercise the masking path.
      s.noise.confusion(i, j) = u(g) < 0.1 ? 0.0 : u(g) + (i == j ? 2.0 : 0.0);
      row += s.noise.confusion(i, j);
    }
    if (row == 0.0) s.noise.confusion(i, i) = row = 1.0;
    s.noise.confusion.row(i) /= row;
  }
  s.noise.score_std = 0.05 + 0.25 * u(g);
  s.noise.position = {0.05 * u(g), 0.1 * u(g), 0.1 + 0.3 * u(g)};
  s.noise.orientation = {0.02 * u(g), 0.05 * u(g), 0.05 + 0.1 * u(g)};
  return s;
}

LabelVector random_distribution(std::mt19937_64& g, int n) {
  std::gamma_distribution<double> gam(0.7, 1.0);
  LabelVector p(n);
  for (int l = 0; l < n; ++l) p(l) = gam(g) + 1e-6;
  return p / p.sum();
}

Outcome bayes_oracle() {
  std::mt19937_64 g(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_label = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(u(g) * 7);
    const auto sensor = random_sensor(g, n);
    ObjectBelief b;
    b.labels = random_distribution(g, n);
    b.mean = Vec2(10.0 * u(g), 10.0 * u(g));
    RobotState robot;
    robot.position = Vec2(10.0 * u(g), 10.0 * u(g));
    Observation z;
    z.label = SemanticClassId{static_cast<int>(u(g) * n)};
    z.score = u(g);
    z.position = b.mean;
    const auto post = update_object(b, z, robot, sensor).belief.labels;

    std::vector<double> prior(n);
    std::vector<std::vector<double>> c(n, std::vector<double>(n));
    std::vector<ScoreParams> score(n);
    for (int i = 0; i < n; ++i) {
      prior[i] = b.labels(i);
      score[i] = sensor.labels.at(SemanticClassId{i}).score;
      for (int j = 0; j < n; ++j) c[i][j] = sensor.noise.confusion(i, j);
    }
    const double d = (b.mean - robot.position).norm();
    const auto oracle = brute_force_posterior(prior, c, score, sensor.noise.score_std, z.label.index, z.score, d);
    for (int l = 0; l < n; ++l) worst_label = std::max(worst_label, std::abs(post(l) - oracle[l]));
  }

  double worst_mean = 0.0, worst_var = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 3;
    const auto sensor = random_sensor(g, n);
    ObjectBelief b;
    b.labels = uniform_labels(n);
    b.mean = Vec2(10.0 * u(g), 10.0 * u(g));
    RobotState robot;
    robot.position = b.mean + Vec2(4.0 * u(g) - 2.0, 4.0 * u(g) - 2.0);
    robot.heading = 2.0 * std::numbers::pi * u(g);
    Observation z;
    z.label = SemanticClassId{static_cast<int>(u(g) * n)};
    z.score = 0.5;
    const auto r = pose_measurement_covariance(robot, b.mean, sensor.noise, sensor.labels.at(z.label).gamma);
    const double r2 = r.position(0, 0);
    // 201 cells over +-6 prior std resolve posteriors down to about a tenth
    // of the prior width.
    const double s_max = std::min(3.0, 10.0 * std::sqrt(r2));
    const double sx = s_max * (0.1 + 0.9 * u(g)), sy = s_max * (0.1 + 0.9 * u(g));
    b.cov = Vec2(sx * sx, sy * sy).asDiagonal();
    std::normal_distribution<double> nx(b.mean.x(), std::sqrt(sx * sx + r2)), ny(b.mean.y(), std::sqrt(sy * sy + r2));
    z.position = Vec2(nx(g), ny(g));
    const auto post = update_object(b, z, robot, sensor).belief;
    for (int axis = 0; axis < 2; ++axis) {
      const auto grid = grid_filter(b.mean(axis), b.cov(axis, axis), z.position(axis), r2);
      worst_mean = std::max(worst_mean, std::abs(post.mean(axis) - grid.mean));
      worst_var = std::max(worst_var, std::abs(post.cov(axis, axis) - grid.var));
    }
  }
  std::ostringstream os;
  os << "10000 label updates, max |diff| " << worst_label << " (tol 1e-12); 2000 pose updates, max mean diff "
     << worst_mean << ", max variance diff " << worst_var << " (tol 1e-3)";
  return {worst_label <= 1e-12 && worst_mean <= 1e-3 && worst_var <= 1e-3, os.str()};
}

Outcome entropy_contraction() {
  std::mt19937_64 g(99173);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_gain = -1e300;
  double worst_trace_growth = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(u(g) * 7);
    auto sensor = random_sensor(g, n);
    // A shared score model makes the class report the only label evidence.
    std::vector<LabelInfo> infos = sensor.labels.all();
    for (auto& info : infos) info.score = infos[0].score;
    sensor.labels = LabelRegistry(infos);

    ObjectBelief b;
    b.labels = random_distribution(g, n);
    b.mean = Vec2(10.0 * u(g), 10.0 * u(g));
    Eigen::Matrix2d a = Eigen::Matrix2d::Random();
    b.cov = a * a.transpose() + 0.05 * Mat2::Identity();
    RobotState robot;
    robot.position = Vec2(10.0 * u(g), 10.0 * u(g));

    const double prior_h = categorical_entropy(b.labels);
    double expected_h = 0.0;
    for (int zl = 0; zl < n; ++zl) {
      double pz = 0.0;
      for (int l = 0; l < n; ++l) pz += b.labels(l) * sensor.noise.confusion(l, zl);
      if (pz == 0.0) continue;
      Observation z;
      z.label = SemanticClassId{zl};
      z.score = 0.6;
      z.position = b.mean + Vec2(u(g) - 0.5, u(g) - 0.5);
      const auto post = update_object(b, z, robot, sensor).belief;
      expected_h += pz * categorical_entropy(post.labels);
      worst_trace_growth = std::max(worst_trace_growth, post.cov.trace() - b.cov.trace());
    }
    worst_gain = std::max(worst_gain, expected_h - prior_h);

    Vec2 mean = b.mean;
    Mat2 cov = b.cov;
    Eigen::Matrix2d c = Eigen::Matrix2d::Random();
    const Mat2 r = c * c.transpose() + 1e-3 * Mat2::Identity();
    kalman_position_update(mean, cov, Vec2(u(g), u(g)), r);
    worst_trace_growth = std::max(worst_trace_growth, cov.trace() - b.cov.trace());
  }
  std::ostringstream os;
  os << "1000 beliefs, max E[H post] - H prior " << worst_gain << " (tol 1e-9); max covariance trace change "
     << worst_trace_growth;
  return {worst_gain <= 1e-9 && worst_trace_growth <= 0.0, os.str()};
}

Outcome planner_soundness() {
  const auto sc = load_scenario(scenario_path("open-hall"));
  const NavGrid nav(sc.floors[0], sc.robot.inflation);
  const SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  const int labels = sc.sensor.labels.size();
  int agree = 0;
  long pruned = 0;
  for (int i = 0; i < 100; ++i) {
    std::mt19937_64 g(mix_seed(777, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RobotState robot;
    robot.position = Vec2(2.0 + 12.0 * u(g), 2.0 + 12.0 * u(g));
    robot.heading = wrap_angle(2.0 * std::numbers::pi * u(g));
    ObjectBelief b;
    const double dist = 1.0 + 7.0 * u(g), angle = 2.0 * std::numbers::pi * u(g);
    b.mean = (robot.position + dist * Vec2(std::cos(angle), std::sin(angle))).cwiseMax(1.0).cwiseMin(15.0);
    const double sd = 0.3 + 3.0 * u(g);
    b.cov = Mat2::Identity() * sd * sd;
    const double p = 0.3 + 0.65 * u(g);
    b.labels = LabelVector::Constant(labels, (1.0 - p) / (labels - 1));
    b.labels(0) = p;
    const auto seed = mix_seed(1, static_cast<std::uint64_t>(i));
    const auto bnb = plan_active_search(b, robot, world, seed, SearchMethod::branch_and_bound);
    const auto full = plan_active_search(b, robot, world, seed, SearchMethod::exhaustive);
    agree += bnb.best == full.best;
    pruned += bnb.stats.pruned;
  }
  std::ostringstream os;
  os << agree << "/100 first actions equal exhaustive expectimax (" << pruned << " actions pruned)";
  return {agree == 100, os.str()};
}

std::vector<std::string> audited_traces;

Outcome search_efficacy() {
  const auto sc = load_scenario(scenario_path("open-hall"));
  const auto& obj = sc.objects.at(0);
  const int labels = sc.sensor.labels.size();
  int reached = 0;
  std::ostringstream times;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 g(stream_seed(seed, Stream::generator));
    std::normal_distribution<double> n(0.0, 1.0);
    ObjectBelief b;
    b.id = obj.id;
    b.floor = obj.floor;
    b.mean = obj.position;
    b.cov = Mat2::Identity() * 9.0;
    b.heading_mean = wrap_angle(obj.orientation + 0.5 * n(g));
    b.heading_var = 1.0;
    b.labels = LabelVector::Constant(labels, 0.3 / (labels - 1));
    b.labels(obj.label.index) = 0.7;
    b.status = AffordanceStatus::to_be_inspected;
    const auto ep = run_search_episode(sc, b, seed, 60.0);
    reached += ep.reached;
    char when[32];
    std::snprintf(when, sizeof when, "%.1f", ep.time);
    times << (seed > 1 ? " " : "") << (ep.reached ? when : "-");
    audited_traces.push_back(ep.trace);
  }
  const double separation = (obj.position - sc.robot.start.position).norm();
  std::ostringstream os;
  os << reached << "/10 seeds reached the confident set within 60 s (object " << separation
     << " m away; times " << times.str() << ")";
  return {reached >= 9, os.str()};
}

std::map<std::string, ExperimentResult> trend_runs;

Outcome trend() {
  const auto sc = load_scenario(scenario_path("office-small"));
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::map<std::string, double> mean;
  for (const auto method : {Method::sb2g, Method::coverage_inspect, Method::coverage_only}) {
    auto r = run_experiment(sc, method, seeds, 700.0);
    double sum = 0.0;
    for (const auto& run : r.runs) {
      sum += run.inspected;
      audited_traces.push_back(run.trace);
    }
    mean[to_string(method)] = sum / static_cast<double>(seeds.size());
    trend_runs[to_string(method)] = std::move(r);
  }
  int dominated = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto a = resample(trace_samples(parse_trace(trend_runs["sb2g"].runs[i].trace)), 10.0, 700.0);
    const auto b = resample(trace_samples(parse_trace(trend_runs["coverage-only"].runs[i].trace)), 10.0, 700.0);
    bool ok = a.size() == b.size();
    for (std::size_t k = 0; ok && k < a.size(); ++k)
      if (a[k].t > 200.0 && a[k].closest_sum > b[k].closest_sum) ok = false;
    dominated += ok;
  }
  const double s = mean["sb2g"], ci = mean["coverage-inspect"], co = mean["coverage-only"];
  std::ostringstream os;
  os << "mean inspected sb2g " << s << ", coverage-inspect " << ci << ", coverage-only " << co
     << " (objects " << sc.objects.size() << "); closest-distance sum dominated after 200 s in " << dominated
     << "/5 seeds";
  return {s > ci && ci > co && s >= 5.0 && dominated >= 4, os.str()};
}

Session scripted_teleop_session() {
  SessionOptions options;
  options.mode = SessionMode::teleop;
  options.seed = 11;
  options.budget = 90.0;
  Session s(load_scenario(scenario_path("office-small")), options);
  s.client_connected();
  s.receive(R"({"type":"start","format_version":1,"tick":0})");
  for (int k = 0; !s.ended(); ++k) {
    const long t = s.simulation().world().tick();
    if (k % 30 == 0) {
      Json cmd{{"type", "cmd_vel"}, {"format_version", 1}, {"tick", t}, {"vx", 0.7}, {"vy", k % 60 ? 0.1 : -0.1},
               {"omega", (k / 30) % 3 == 0 ? 0.5 : -0.2}};
      s.receive(cmd.dump());
    }
    if (k == 200) s.receive(R"({"type":"pause","format_version":1,"tick":0})");
    if (k == 220) s.receive(R"({"type":"start","format_version":1,"tick":0})");
    if (k == 400 && !s.simulation().belief().objects.empty()) {
      const auto id = s.simulation().belief().objects.begin()->first;
      s.receive(Json{{"type", "trigger_inspect"}, {"format_version", 1}, {"tick", t}, {"object_id", id}}.dump());
    }
    s.advance();
  }
  return s;
}

Outcome graph_discipline() {
  int transitions = 0, violations = 0, schema = 0;
  std::string first;
  for (const auto& text : audited_traces) {
    const auto errors = validate_trace(text);
    schema += static_cast<int>(errors.size());
    if (!errors.empty() && first.empty()) first = errors.front();
    const auto report = audit_trace(parse_trace(text));
    transitions += report.transitions;
    violations += static_cast<int>(report.violations.size());
    if (!report.ok() && first.empty()) first = report.violations.front();
  }
  std::ostringstream os;
  os << audited_traces.size() << " traces, " << transitions << " transitions, " << violations << " violations, "
     << schema << " schema errors";
  if (!first.empty()) os << " (first: " << first << ")";
  return {violations == 0 && schema == 0 && transitions > 0, os.str()};
}

Outcome determinism() {
  const auto sc = load_scenario(scenario_path("office-small"));
  int checked = 0, identical = 0;
  for (const auto& [name, result] : trend_runs) {
    const auto again = run_episode(sc, method_from_string(name), result.seeds.front(), 700.0);
    ++checked;
    identical += again.hash == result.runs.front().hash && again.hash == sha256_hex(again.trace);
    const auto replayed = replay_trace(result.runs.front().trace);
    ++checked;
    identical += replayed.hash == result.runs.front().hash;
  }

  const auto session = scripted_teleop_session();
  const auto& sim = session.simulation();
  const auto replay = replay_commands(parse_trace(session.trace()));
  const bool metrics = replay.hash == sha256_hex(session.trace()) && replay.inspected == sim.inspected() &&
                       replay.score == sim.score() && replay.path_length == sim.world().path_length() &&
                       replay.reason == sim.end_reason();
  const auto again = scripted_teleop_session();
  const bool session_stable = sha256_hex(again.trace()) == sha256_hex(session.trace());
  char path[32];
  std::snprintf(path, sizeof path, "%.2f", sim.world().path_length());
  std::ostringstream os;
  os << identical << "/" << checked << " reruns and decision replays bit-identical; teleop command-log replay "
     << (metrics ? "reproduces" : "does not reproduce") << " hash, inspected, score and path length (path "
     << path << " m); repeated session "
     << (session_stable ? "identical" : "differs");
  audited_traces.push_back(session.trace());
  return {identical == checked && metrics && session_stable, os.str()};
}

}  // namespace

int main() {
  std::cout << "sb2g acceptance (workers: " << worker_count() << ")" << std::endl;
  criterion("bayes-oracle", 10.0, bayes_oracle);
  criterion("entropy-contraction", 5.0, entropy_contraction);
  criterion("planner-soundness", 60.0, planner_soundness);
  criterion("search-efficacy", 120.0, search_efficacy);
  criterion("trend-office-small", 600.0, trend);
  criterion("determinism", 0.0, determinism);
  criterion("graph-discipline", 0.0, graph_discipline);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " of 7 criteria failed" << std::endl;
  return failures ? 1 : 0;
}
