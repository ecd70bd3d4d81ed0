#ifndef SB2G_SERIALIZATION_HPP
#define SB2G_SERIALIZATION_HPP

#include "sb2g/types.hpp"

#include <json.hpp>

#include <string>

namespace sb2g {

using Json = nlohmann::json;

Json to_json(const Vec2& v);
Vec2 vec2_from_json(const Json& j, const std::string& path = "");

Json to_json(const RobotState& s);
RobotState robot_state_from_json(const Json& j, const std::string& path = "");

Json to_json(const ObjectTruth& o, const LabelRegistry& labels);
ObjectTruth object_truth_from_json(const Json& j, const LabelRegistry& labels, const std::string& path = "");

Json to_json(const Observation& z, const LabelRegistry& labels);
Observation observation_from_json(const Json& j, const LabelRegistry& labels, const std::string& path = "");

Json to_json(const ControlInput& u);
ControlInput control_from_json(const Json& j, const std::string& path = "");

Json to_json(const ObjectBelief& b, const LabelRegistry& labels);
ObjectBelief object_belief_from_json(const Json& j, const LabelRegistry& labels, const std::string& path = "");

// Field access that reports the JSON path of missing or mistyped values.
namespace field {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
T required(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(join(path, key), "missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(join(path, key), std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
T optional(const Json& j, const std::string& key, const T& fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(join(path, key), std::string("wrong type (") + e.what() + ")");
  }
}

inline const Json& object(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(join(path, key), "missing required field");
  return j.at(key);
}

}  // namespace field

}  // namespace sb2g

#endif  // SB2G_SERIALIZATION_HPP
