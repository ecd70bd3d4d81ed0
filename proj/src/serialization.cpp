#include "sb2g/serialization.hpp"

namespace sb2g {

Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Vec2 vec2_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ScenarioError(path, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const RobotState& s) {
  return {{"position", to_json(s.position)},
          {"heading", s.heading},
          {"floor", s.floor},
          {"gait", to_string(s.gait)},
          {"sensor_active", s.sensor_active}};
}

RobotState robot_state_from_json(const Json& j, const std::string& path) {
  RobotState s;
  s.position = vec2_from_json(field::object(j, "position", path), field::join(path, "position"));
  s.heading = field::optional<double>(j, "heading", 0.0, path);
  s.floor = field::optional<int>(j, "floor", 0, path);
  s.gait = gait_from_string(field::optional<std::string>(j, "gait", "walk", path));
  s.sensor_active = field::optional<bool>(j, "sensor_active", true, path);
  return s;
}

Json to_json(const ObjectTruth& o, const LabelRegistry& labels) {
  return {{"id", o.id},
          {"label", labels.at(o.label).name},
          {"position", to_json(o.position)},
          {"orientation", o.orientation},
          {"floor", o.floor},
          {"status", to_string(o.status)}};
}

ObjectTruth object_truth_from_json(const Json& j, const LabelRegistry& labels, const std::string& path) {
  ObjectTruth o;
  o.id = field::required<int>(j, "id", path);
  const auto name = field::required<std::string>(j, "label", path);
  auto label = labels.find(name);
  if (!label) throw ScenarioError(field::join(path, "label"), "unknown label '" + name + "'");
  o.label = *label;
  o.position = vec2_from_json(field::object(j, "position", path), field::join(path, "position"));
  o.orientation = field::optional<double>(j, "orientation", 0.0, path);
  o.floor = field::optional<int>(j, "floor", 0, path);
  const auto fallback = to_string(initial_status(labels.at(o.label).affordance));
  o.status = status_from_string(field::optional<std::string>(j, "status", fallback, path));
  return o;
}

Json to_json(const Observation& z, const LabelRegistry& labels) {
  return {{"object_id", z.object_id},
          {"position", to_json(z.position)},
          {"orientation", z.orientation},
          {"label", labels.at(z.label).name},
          {"score", z.score}};
}

Observation observation_from_json(const Json& j, const LabelRegistry& labels, const std::string& path) {
  Observation z;
  z.object_id = field::required<int>(j, "object_id", path);
  z.position = vec2_from_json(field::object(j, "position", path), field::join(path, "position"));
  z.orientation = field::required<double>(j, "orientation", path);
  const auto name = field::required<std::string>(j, "label", path);
  auto label = labels.find(name);
  if (!label) throw ScenarioError(field::join(path, "label"), "unknown label '" + name + "'");
  z.label = *label;
  z.score = field::required<double>(j, "score", path);
  if (z.score < 0.0 || z.score > 1.0) throw ScenarioError(field::join(path, "score"), "must be in [0, 1]");
  return z;
}

Json to_json(const ControlInput& u) {
  Json j = {{"vx", u.vx}, {"vy", u.vy}, {"omega", u.omega}};
  if (const auto* t = std::get_if<TriggerInspect>(&u.action)) {
    j["action"] = {{"kind", "trigger_inspect"},
                   {"object_id", t->object_id},
                   {"believed_position", to_json(t->believed_position)}};
  } else if (const auto* g = std::get_if<SetGait>(&u.action)) {
    j["action"] = {{"kind", "set_gait"}, {"mode", to_string(g->gait)}};
  }
  return j;
}

ControlInput control_from_json(const Json& j, const std::string& path) {
  ControlInput u;
  u.vx = field::required<double>(j, "vx", path);
  u.vy = field::required<double>(j, "vy", path);
  u.omega = field::required<double>(j, "omega", path);
  if (j.contains("action")) {
    const auto& a = j.at("action");
    const auto apath = field::join(path, "action");
    const auto kind = field::required<std::string>(a, "kind", apath);
    if (kind == "trigger_inspect") {
      TriggerInspect t;
      t.object_id = field::required<int>(a, "object_id", apath);
      t.believed_position =
          vec2_from_json(field::object(a, "believed_position", apath), field::join(apath, "believed_position"));
      u.action = t;
    } else if (kind == "set_gait") {
      u.action = SetGait{gait_from_string(field::required<std::string>(a, "mode", apath))};
    } else {
      throw ScenarioError(field::join(apath, "kind"), "unknown action '" + kind + "'");
    }
  }
  return u;
}

Json to_json(const ObjectBelief& b, const LabelRegistry& labels) {
  Json probs = Json::object();
  for (int l = 0; l < labels.size(); ++l) probs[labels.at(SemanticClassId{l}).name] = b.labels(l);
  return {{"id", b.id},
          {"floor", b.floor},
          {"mean", to_json(b.mean)},
          {"cov", Json::array({b.cov(0, 0), b.cov(0, 1), b.cov(1, 1)})},
          {"heading", b.heading_mean},
          {"heading_var", b.heading_var},
          {"labels", probs},
          {"status", to_string(b.status)},
          {"last_miss", b.last_negative_update}};
}

ObjectBelief object_belief_from_json(const Json& j, const LabelRegistry& labels, const std::string& path) {
  ObjectBelief b;
  b.id = field::required<int>(j, "id", path);
  b.floor = field::optional<int>(j, "floor", 0, path);
  b.mean = vec2_from_json(field::object(j, "mean", path), field::join(path, "mean"));
  const auto cov = field::required<std::vector<double>>(j, "cov", path);
  if (cov.size() != 3) throw ScenarioError(field::join(path, "cov"), "expected [xx, xy, yy]");
  b.cov << cov[0], cov[1], cov[1], cov[2];
  b.heading_mean = field::required<double>(j, "heading", path);
  b.heading_var = field::required<double>(j, "heading_var", path);
  const auto& probs = field::object(j, "labels", path);
  b.labels = LabelVector::Zero(labels.size());
  for (int l = 0; l < labels.size(); ++l) {
    const auto& name = labels.at(SemanticClassId{l}).name;
    b.labels(l) = field::required<double>(probs, name, field::join(path, "labels"));
  }
  b.status = status_from_string(field::required<std::string>(j, "status", path));
  b.last_negative_update = field::optional<double>(j, "last_miss", -1e300, path);
  return b;
}

}  // namespace sb2g
