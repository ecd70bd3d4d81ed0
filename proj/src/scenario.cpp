#include "sb2g/scenario.hpp"

#include "sb2g/rng.hpp"
#include "sb2g/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sb2g {

void PlannerConfig::validate() const {
  if (!(horizon > 0.0)) throw ScenarioError("planner.horizon", "must be > 0");
  if (action_samples < 1) throw ScenarioError("planner.action_samples", "must be >= 1");
  if (steps < 1) throw ScenarioError("planner.steps", "must be >= 1");
  if (outcome_samples < 1) throw ScenarioError("planner.outcome_samples", "must be >= 1");
  if (!(entropy_weight >= 0.0)) throw ScenarioError("planner.entropy_weight", "must be >= 0");
  if (!(min_displacement >= 0.0 && max_displacement >= min_displacement))
    throw ScenarioError("planner.max_displacement", "displacement range is empty");
}

void Thresholds::validate() const {
  auto prob = [](double p, const char* f) {
    if (!(p > 0.0 && p < 1.0)) throw ScenarioError(f, "must be in (0, 1)");
  };
  auto pos = [](double v, const char* f) {
    if (!(v > 0.0)) throw ScenarioError(f, "must be > 0");
  };
  prob(search_probability, "thresholds.search.probability");
  prob(confident_probability, "thresholds.confident.probability");
  prob(absent_probability, "thresholds.absent.probability");
  pos(search_std, "thresholds.search.std");
  pos(confident_std, "thresholds.confident.std");
  pos(confident_distance, "thresholds.confident.distance");
  pos(abort_std_factor, "thresholds.abort_std_factor");
}

const ObjectTruth* WorldScenario::object(ObjectId id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const StairZone* WorldScenario::stair_for(ObjectId id) const {
  for (const auto& s : stairs)
    if (s.object == id) return &s;
  return nullptr;
}

int WorldScenario::task_count() const {
  int n = 0;
  for (const auto& o : objects)
    if (sensor.labels.at(o.label).affordance != Affordance::none) ++n;
  return n;
}

bool StairFrame::contains(const Vec2& p) const {
  const double a = along(p);
  const double c = across(p);
  return a >= 0.0 && a <= length && std::abs(c) <= 0.5 * width;
}

StairFrame stair_frame(const Vec2& position, double orientation, double length, double width) {
  StairFrame f;
  f.origin = position;
  const double up = orientation + std::numbers::pi;
  f.ascent = Vec2(std::cos(up), std::sin(up));
  f.lateral = Vec2(-f.ascent.y(), f.ascent.x());
  f.length = length;
  f.width = width;
  return f;
}

StairFrame stair_frame(const ObjectTruth& stair, const StairZone& zone) {
  return stair_frame(stair.position, stair.orientation, zone.length, zone.width);
}

namespace {

void stamp_stairs(WorldScenario& s) {
  for (const auto& zone : s.stairs) {
    const auto* obj = s.object(zone.object);
    if (!obj) continue;
    auto& grid = s.floors.at(static_cast<std::size_t>(obj->floor));
    const auto frame = stair_frame(*obj, zone);
    for (int y = 0; y < grid.height(); ++y)
      for (int x = 0; x < grid.width(); ++x) {
        const Cell c{x, y};
        if (grid.at(c) == CellState::free && frame.contains(grid.center_of(c))) grid.set(c, CellState::stair);
      }
  }
}

}  // namespace

void WorldScenario::validate() const {
  if (floors.empty()) throw ScenarioError("map.floors", "at least one floor is required");
  for (std::size_t f = 1; f < floors.size(); ++f)
    if (floors[f].cell_size() != floors[0].cell_size())
      throw ScenarioError("map.floors[" + std::to_string(f) + "]", "all floors must share one cell size");
  sensor.validate();
  thresholds.validate();
  planner.validate();
  if (!(budget > 0.0)) throw ScenarioError("budget", "must be > 0");
  if (!(tick_rate > 0.0)) throw ScenarioError("tick_rate", "must be > 0");
  if (!(coverage.footprint_radius > 0.0)) throw ScenarioError("coverage.footprint_radius", "must be > 0");
  if (!(robot.limits.v_max > 0.0 && robot.limits.v_max_lateral >= 0.0 && robot.limits.omega_max > 0.0))
    throw ScenarioError("robot.limits", "velocity limits must be positive");

  const auto& start = robot.start;
  if (start.floor < 0 || start.floor >= static_cast<int>(floors.size()))
    throw ScenarioError("robot.start.floor", "no such floor");
  if (!floor(start.floor).is_free(start.position))
    throw ScenarioError("robot.start.position", "start pose must be in free space");

  std::set<ObjectId> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string path = "objects[" + std::to_string(i) + "]";
    if (!ids.insert(o.id).second) throw ScenarioError(path + ".id", "duplicate object id " + std::to_string(o.id));
    if (o.label.index < 0 || o.label.index >= sensor.labels.size())
      throw ScenarioError(path + ".label", "label not registered");
    if (o.floor < 0 || o.floor >= static_cast<int>(floors.size()))
      throw ScenarioError(path + ".floor", "no such floor");
    const CellState cell = floor(o.floor).state_at(o.position);
    if (cell == CellState::occupied || cell == CellState::unknown)
      throw ScenarioError(path + ".position", "object placed in an occupied cell");
  }

  for (std::size_t i = 0; i < stairs.size(); ++i) {
    const auto& z = stairs[i];
    const std::string path = "stairs[" + std::to_string(i) + "]";
    const auto* obj = object(z.object);
    if (!obj) throw ScenarioError(path + ".object", "no such object");
    if (sensor.labels.at(obj->label).affordance != Affordance::ascend)
      throw ScenarioError(path + ".object", "stair zones must reference an object with the ascend affordance");
    if (obj->floor + 1 >= static_cast<int>(floors.size()))
      throw ScenarioError(path + ".object", "stairs on the top floor lead nowhere");
    if (!(z.length > 0.0 && z.width > 0.0)) throw ScenarioError(path, "length and width must be > 0");
    if (!floor(obj->floor + 1).is_free(z.exit.position))
      throw ScenarioError(path + ".exit.position", "exit pose must be in free space");
  }
}

WorldScenario parse_scenario(const nlohmann::json& j) {
  using namespace field;
  if (!j.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  const int version = required<int>(j, "format_version", "");
  if (version != kScenarioFormatVersion)
    throw ScenarioError("format_version", "unsupported version " + std::to_string(version));

  WorldScenario s;
  s.name = optional<std::string>(j, "name", "unnamed", "");

  // Labels.
  const auto& labels = object(j, "labels", "");
  if (!labels.is_array()) throw ScenarioError("labels", "expected an array");
  std::vector<LabelInfo> infos;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    const std::string p = "labels[" + std::to_string(i) + "]";
    LabelInfo info;
    info.name = required<std::string>(l, "name", p);
    info.gamma = optional<double>(l, "gamma", info.gamma, p);
    info.standoff = optional<double>(l, "standoff", info.standoff, p);
    info.reward = optional<double>(l, "reward", info.reward, p);
    info.affordance = affordance_from_string(optional<std::string>(l, "affordance", "inspect", p));
    if (l.contains("score")) {
      const auto& sc = l.at("score");
      info.score.peak = optional<double>(sc, "p", info.score.peak, p + ".score");
      info.score.optimal_distance = optional<double>(sc, "m", info.score.optimal_distance, p + ".score");
      info.score.decay = optional<double>(sc, "v", info.score.decay, p + ".score");
    }
    if (l.contains("detection")) {
      const auto& dc = l.at("detection");
      info.base_detection = optional<double>(dc, "p0", info.base_detection, p + ".detection");
      info.optimal_detection_distance = optional<double>(dc, "m0", info.optimal_detection_distance, p + ".detection");
      info.detection_decay = optional<double>(dc, "v0", info.detection_decay, p + ".detection");
    }
    infos.push_back(info);
  }
  s.sensor.labels = LabelRegistry(std::move(infos));

  // Sensor.
  const auto& sensor = object(j, "sensor", "");
  s.sensor.fov_half_angle = optional<double>(sensor, "fov_half_angle", s.sensor.fov_half_angle, "sensor");
  s.sensor.max_range = optional<double>(sensor, "max_range", s.sensor.max_range, "sensor");
  s.sensor.period = optional<double>(sensor, "period", s.sensor.period, "sensor");
  s.sensor.noise.score_std = optional<double>(sensor, "score_std", s.sensor.noise.score_std, "sensor");
  auto read_noise = [&](const char* key, PoseNoise& n) {
    if (!sensor.contains(key)) return;
    const auto& nj = sensor.at(key);
    const std::string p = std::string("sensor.") + key;
    n.distance = optional<double>(nj, "distance", n.distance, p);
    n.bearing = optional<double>(nj, "bearing", n.bearing, p);
    n.label = optional<double>(nj, "label", n.label, p);
  };
  read_noise("position_noise", s.sensor.noise.position);
  read_noise("orientation_noise", s.sensor.noise.orientation);
  const auto rows = required<std::vector<std::vector<double>>>(sensor, "confusion", "sensor");
  const int n = s.sensor.labels.size();
  if (static_cast<int>(rows.size()) != n) throw ScenarioError("sensor.confusion", "needs one row per label");
  s.sensor.noise.confusion = Eigen::MatrixXd(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw ScenarioError("sensor.confusion[" + std::to_string(r) + "]", "needs one column per label");
    for (int c = 0; c < n; ++c)
      s.sensor.noise.confusion(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }

  // Map.
  const auto& map = object(j, "map", "");
  const double cell = required<double>(map, "cell_size", "map");
  if (!(cell > 0.0)) throw ScenarioError("map.cell_size", "must be > 0");
  Vec2 origin = Vec2::Zero();
  if (map.contains("origin")) origin = vec2_from_json(map.at("origin"), "map.origin");
  const auto floors = required<std::vector<std::vector<std::string>>>(map, "floors", "map");
  for (std::size_t f = 0; f < floors.size(); ++f) {
    try {
      s.floors.push_back(OccupancyGrid::from_rows(floors[f], cell, origin));
    } catch (const ScenarioError& e) {
      throw ScenarioError("map.floors[" + std::to_string(f) + "]", e.what());
    }
  }

  // Objects.
  const auto& objects = object(j, "objects", "");
  if (!objects.is_array()) throw ScenarioError("objects", "expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i)
    s.objects.push_back(object_truth_from_json(objects[i], s.sensor.labels, "objects[" + std::to_string(i) + "]"));

  if (j.contains("stairs")) {
    const auto& stairs = j.at("stairs");
    for (std::size_t i = 0; i < stairs.size(); ++i) {
      const auto& z = stairs[i];
      const std::string p = "stairs[" + std::to_string(i) + "]";
      StairZone zone;
      zone.object = required<int>(z, "object", p);
      zone.length = optional<double>(z, "length", zone.length, p);
      zone.width = optional<double>(z, "width", zone.width, p);
      const auto& exit = object(z, "exit", p);
      zone.exit.position = vec2_from_json(object(exit, "position", p + ".exit"), p + ".exit.position");
      zone.exit.heading = optional<double>(exit, "heading", 0.0, p + ".exit");
      s.stairs.push_back(zone);
    }
  }

  // Robot.
  const auto& robot = object(j, "robot", "");
  s.robot.start = robot_state_from_json(object(robot, "start", "robot"), "robot.start");
  if (robot.contains("limits")) {
    const auto& l = robot.at("limits");
    auto& lim = s.robot.limits;
    lim.v_max = optional<double>(l, "v_max", lim.v_max, "robot.limits");
    lim.v_max_lateral = optional<double>(l, "v_max_lateral", lim.v_max_lateral, "robot.limits");
    lim.omega_max = optional<double>(l, "omega_max", lim.omega_max, "robot.limits");
    lim.stair_speed = optional<double>(l, "stair_speed", lim.stair_speed, "robot.limits");
  }
  s.robot.motion_noise_std = optional<double>(robot, "motion_noise_std", s.robot.motion_noise_std, "robot");
  s.robot.heading_noise_std = optional<double>(robot, "heading_noise_std", s.robot.heading_noise_std, "robot");
  s.robot.perfect_localization =
      optional<bool>(robot, "perfect_localization", s.robot.perfect_localization, "robot");
  s.robot.localization_std = optional<double>(robot, "localization_std", s.robot.localization_std, "robot");
  s.robot.inflation = optional<double>(robot, "inflation", s.robot.inflation, "robot");

  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    auto& th = s.thresholds;
    if (t.contains("search")) {
      th.search_probability = optional<double>(t.at("search"), "probability", th.search_probability, "thresholds.search");
      th.search_std = optional<double>(t.at("search"), "std", th.search_std, "thresholds.search");
    }
    if (t.contains("confident")) {
      const auto& c = t.at("confident");
      th.confident_probability = optional<double>(c, "probability", th.confident_probability, "thresholds.confident");
      th.confident_std = optional<double>(c, "std", th.confident_std, "thresholds.confident");
      th.confident_distance = optional<double>(c, "distance", th.confident_distance, "thresholds.confident");
    }
    if (t.contains("absent"))
      th.absent_probability = optional<double>(t.at("absent"), "probability", th.absent_probability, "thresholds.absent");
    th.abort_std_factor = optional<double>(t, "abort_std_factor", th.abort_std_factor, "thresholds");
  }

  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    auto& pc = s.planner;
    pc.horizon = optional<double>(p, "horizon", pc.horizon, "planner");
    pc.action_samples = optional<int>(p, "action_samples", pc.action_samples, "planner");
    pc.steps = optional<int>(p, "steps", pc.steps, "planner");
    pc.entropy_weight = optional<double>(p, "entropy_weight", pc.entropy_weight, "planner");
    pc.outcome_samples = optional<int>(p, "outcome_samples", pc.outcome_samples, "planner");
    pc.min_displacement = optional<double>(p, "min_displacement", pc.min_displacement, "planner");
    pc.max_displacement = optional<double>(p, "max_displacement", pc.max_displacement, "planner");
  }

  if (j.contains("coverage")) {
    const auto& c = j.at("coverage");
    s.coverage.footprint_radius = optional<double>(c, "footprint_radius", s.coverage.footprint_radius, "coverage");
    s.coverage.lidar_range = optional<double>(c, "lidar_range", s.coverage.lidar_range, "coverage");
    s.coverage.candidate_cells = optional<int>(c, "candidate_cells", s.coverage.candidate_cells, "coverage");
    s.coverage.lookahead = optional<double>(c, "lookahead", s.coverage.lookahead, "coverage");
  }

  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    s.filter.spawn_inflation = optional<double>(f, "spawn_inflation", s.filter.spawn_inflation, "filter");
    s.filter.label_smoothing = optional<double>(f, "label_smoothing", s.filter.label_smoothing, "filter");
    s.filter.negative_update_interval =
        optional<double>(f, "negative_update_interval", s.filter.negative_update_interval, "filter");
  }

  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    s.reward.cost_per_meter = optional<double>(r, "cost_per_meter", s.reward.cost_per_meter, "reward");
    s.reward.cost_per_second = optional<double>(r, "cost_per_second", s.reward.cost_per_second, "reward");
    s.reward.stair_failure_penalty =
        optional<double>(r, "stair_failure_penalty", s.reward.stair_failure_penalty, "reward");
  }

  s.budget = optional<double>(j, "budget", s.budget, "");
  s.tick_rate = optional<double>(j, "tick_rate", s.tick_rate, "");
  s.seed = optional<std::uint64_t>(j, "seed", s.seed, "");

  stamp_stairs(s);
  s.validate();
  return s;
}

WorldScenario parse_scenario_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError("", "JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                                ": " + e.what());
  }
  return parse_scenario(j);
}

WorldScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario_text(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.field(), path.filename().string() + ": " + e.what());
  }
}

nlohmann::json scenario_to_json(const WorldScenario& s) {
  using nlohmann::json;
  json labels = json::array();
  for (const auto& l : s.sensor.labels.all()) {
    labels.push_back({{"name", l.name},
                      {"gamma", l.gamma},
                      {"standoff", l.standoff},
                      {"reward", l.reward},
                      {"affordance", to_string(l.affordance)},
                      {"score", {{"p", l.score.peak}, {"m", l.score.optimal_distance}, {"v", l.score.decay}}},
                      {"detection",
                       {{"p0", l.base_detection}, {"m0", l.optimal_detection_distance}, {"v0", l.detection_decay}}}});
  }
  json confusion = json::array();
  for (int r = 0; r < s.sensor.noise.confusion.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < s.sensor.noise.confusion.cols(); ++c) row.push_back(s.sensor.noise.confusion(r, c));
    confusion.push_back(row);
  }
  auto noise = [](const PoseNoise& n) { return json{{"distance", n.distance}, {"bearing", n.bearing}, {"label", n.label}}; };
  json floors = json::array();
  for (const auto& f : s.floors) {
    // Stair cells are re-derived from the stair zones on load.
    auto rows = f.to_rows();
    for (auto& r : rows) std::replace(r.begin(), r.end(), 'S', '.');
    floors.push_back(rows);
  }
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back(to_json(o, s.sensor.labels));
  json stairs = json::array();
  for (const auto& z : s.stairs)
    stairs.push_back({{"object", z.object},
                      {"length", z.length},
                      {"width", z.width},
                      {"exit", {{"position", to_json(z.exit.position)}, {"heading", z.exit.heading}}}});
  const auto& lim = s.robot.limits;
  const auto& th = s.thresholds;
  const auto& pc = s.planner;
  return {
      {"format_version", kScenarioFormatVersion},
      {"name", s.name},
      {"map",
       {{"cell_size", s.floors.front().cell_size()}, {"origin", to_json(s.floors.front().origin())}, {"floors", floors}}},
      {"labels", labels},
      {"sensor",
       {{"fov_half_angle", s.sensor.fov_half_angle},
        {"max_range", s.sensor.max_range},
        {"period", s.sensor.period},
        {"score_std", s.sensor.noise.score_std},
        {"position_noise", noise(s.sensor.noise.position)},
        {"orientation_noise", noise(s.sensor.noise.orientation)},
        {"confusion", confusion}}},
      {"objects", objects},
      {"stairs", stairs},
      {"robot",
       {{"start", to_json(s.robot.start)},
        {"limits",
         {{"v_max", lim.v_max},
          {"v_max_lateral", lim.v_max_lateral},
          {"omega_max", lim.omega_max},
          {"stair_speed", lim.stair_speed}}},
        {"motion_noise_std", s.robot.motion_noise_std},
        {"heading_noise_std", s.robot.heading_noise_std},
        {"perfect_localization", s.robot.perfect_localization},
        {"localization_std", s.robot.localization_std},
        {"inflation", s.robot.inflation}}},
      {"thresholds",
       {{"search", {{"probability", th.search_probability}, {"std", th.search_std}}},
        {"confident",
         {{"probability", th.confident_probability}, {"std", th.confident_std}, {"distance", th.confident_distance}}},
        {"absent", {{"probability", th.absent_probability}}},
        {"abort_std_factor", th.abort_std_factor}}},
      {"planner",
       {{"horizon", pc.horizon},
        {"action_samples", pc.action_samples},
        {"steps", pc.steps},
        {"entropy_weight", pc.entropy_weight},
        {"outcome_samples", pc.outcome_samples},
        {"min_displacement", pc.min_displacement},
        {"max_displacement", pc.max_displacement}}},
      {"coverage",
       {{"footprint_radius", s.coverage.footprint_radius},
        {"lidar_range", s.coverage.lidar_range},
        {"candidate_cells", s.coverage.candidate_cells},
        {"lookahead", s.coverage.lookahead}}},
      {"filter",
       {{"spawn_inflation", s.filter.spawn_inflation},
        {"label_smoothing", s.filter.label_smoothing},
        {"negative_update_interval", s.filter.negative_update_interval}}},
      {"reward",
       {{"cost_per_meter", s.reward.cost_per_meter},
        {"cost_per_second", s.reward.cost_per_second},
        {"stair_failure_penalty", s.reward.stair_failure_penalty}}},
      {"budget", s.budget},
      {"tick_rate", s.tick_rate},
      {"seed", s.seed}};
}

WorldScenario generate_scenario(const WorldScenario& base, const GenerationSpec& spec, std::uint64_t seed) {
  if (spec.labels.empty()) throw ScenarioError("generate.labels", "at least one label is required");
  if (spec.floor < 0 || spec.floor >= static_cast<int>(base.floors.size()))
    throw ScenarioError("generate.floor", "no such floor");
  WorldScenario s = base;
  s.objects.clear();
  s.stairs.clear();
  for (auto& f : s.floors)
    for (std::size_t i = 0; i < f.cell_count(); ++i)
      if (f.at(f.cell_at(i)) == CellState::stair) f.set(f.cell_at(i), CellState::free);

  const auto& grid = s.floor(spec.floor);
  const NavGrid nav(grid, s.robot.inflation);
  const Vec2 start = s.robot.start.position;
  const auto reach = flood(nav, start);
  std::vector<std::size_t> candidates;
  for (std::size_t i : reach.order) {
    const Vec2 c = grid.center_of(grid.cell_at(i));
    if ((c - start).norm() >= 2.0 || spec.floor != s.robot.start.floor) candidates.push_back(i);
  }
  std::mt19937_64 rng(stream_seed(seed, Stream::generator));
  std::shuffle(candidates.begin(), candidates.end(), rng);

  std::vector<ObjectTruth> placed;
  for (std::size_t i : candidates) {
    if (static_cast<int>(placed.size()) == spec.count) break;
    const Vec2 p = grid.center_of(grid.cell_at(i));
    bool ok = true;
    for (const auto& o : placed)
      if ((o.position - p).norm() < spec.min_separation) ok = false;
    if (!ok) continue;
    // Face away from the closest wall within 3 m.
    double facing = 0.0;
    double best = 1e300;
    const int r = static_cast<int>(std::ceil(3.0 / grid.cell_size()));
    const Cell c0 = grid.cell_at(i);
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell c{c0.x + dx, c0.y + dy};
        if (grid.at(c) != CellState::occupied) continue;
        const Vec2 w = grid.center_of(c);
        const double d = (w - p).norm();
        if (d < best) {
          best = d;
          facing = std::atan2(p.y() - w.y(), p.x() - w.x());
        }
      }
    ObjectTruth o;
    o.id = static_cast<int>(placed.size());
    o.label = s.sensor.labels.require(spec.labels[placed.size() % spec.labels.size()]);
    if (s.sensor.labels.at(o.label).affordance == Affordance::ascend)
      throw ScenarioError("generate.labels", "generated scenarios cannot place stairs");
    o.position = p;
    o.orientation = wrap_angle(facing);
    o.floor = spec.floor;
    o.status = initial_status(s.sensor.labels.at(o.label).affordance);
    placed.push_back(o);
  }
  if (static_cast<int>(placed.size()) < spec.count)
    throw ScenarioError("generate.count", "could not place " + std::to_string(spec.count) +
                                              " objects with the requested separation");
  s.objects = std::move(placed);
  s.seed = seed;
  s.validate();
  return s;
}

}  // namespace sb2g
