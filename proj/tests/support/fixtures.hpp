#ifndef SB2G_TESTS_FIXTURES_HPP
#define SB2G_TESTS_FIXTURES_HPP

#include "sb2g/scenario.hpp"
#include "sb2g/trace.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sb2g::fixtures {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(SB2G_SCENARIO_DIR) / (name + ".json");
}

inline Json scenario_json(const std::string& name) { return Json::parse(read_text(scenario_path(name))); }

inline WorldScenario load(const std::string& name) { return load_scenario(scenario_path(name)); }

// Walled rectangle, cols x rows cells of 0.25 m.
inline std::vector<std::string> room_rows(int cols, int rows) {
  std::vector<std::string> out;
  for (int r = 0; r < rows; ++r) {
    if (r == 0 || r == rows - 1)
      out.emplace_back(static_cast<std::size_t>(cols), '#');
    else
      out.push_back("#" + std::string(static_cast<std::size_t>(cols - 2), '.') + "#");
  }
  return out;
}

inline Json object_json(int id, const std::string& label, Vec2 p, double orientation, int floor = 0) {
  return {{"id", id}, {"label", label}, {"position", {p.x(), p.y()}}, {"orientation", orientation}, {"floor", floor}};
}

// office-small's sensor, labels and tuning in a plain room.
inline Json room_scenario_json(int cols, int rows, Vec2 start, double heading, Json objects, double budget = 120.0) {
  Json j = scenario_json("office-small");
  j["name"] = "room";
  j["map"]["floors"] = Json::array({room_rows(cols, rows)});
  j["map"]["origin"] = {0.0, 0.0};
  j["objects"] = std::move(objects);
  j["stairs"] = Json::array();
  j["robot"]["start"] = {{"position", {start.x(), start.y()}}, {"heading", heading}, {"floor", 0}};
  j["budget"] = budget;
  return j;
}

inline WorldScenario room_scenario(int cols, int rows, Vec2 start, double heading, Json objects,
                                   double budget = 120.0) {
  return parse_scenario(room_scenario_json(cols, rows, start, heading, std::move(objects), budget));
}

inline LabelVector labels_of(std::initializer_list<double> values) {
  LabelVector v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace sb2g::fixtures

#endif  // SB2G_TESTS_FIXTURES_HPP
