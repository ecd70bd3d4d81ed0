#include "sb2g/trace.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sb2g {

void TraceWriter::write(const Json& record) {
  text_ += record.dump();
  text_ += '\n';
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

ParsedTrace parse_trace(const std::string& text) {
  ParsedTrace out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ScenarioError("trace line " + std::to_string(n), e.what());
    }
    const auto type = field::required<std::string>(j, "type", "trace line " + std::to_string(n));
    if (type == "header") {
      out.header = std::move(j);
    } else if (type == "tick") {
      MetricsSample s;
      const std::string path = "trace line " + std::to_string(n);
      s.t = field::required<double>(j, "t", path);
      s.inspected = field::required<int>(j, "inspected", path);
      s.closest_sum = field::required<double>(j, "closest_sum", path);
      s.path_length = field::required<double>(j, "path_length", path);
      s.score = field::required<double>(j, "score", path);
      out.samples.push_back(s);
      out.ticks.push_back(std::move(j));
    } else if (type == "event") {
      out.events.push_back(std::move(j));
    } else if (type == "end") {
      out.end = std::move(j);
    } else {
      throw ScenarioError("trace line " + std::to_string(n), "unknown record type '" + type + "'");
    }
  }
  if (out.header.is_null()) throw ScenarioError("trace", "missing header record");
  return out;
}

namespace {

using Check = bool (*)(const Json&);

bool is_number(const Json& j) { return j.is_number(); }
bool is_integer(const Json& j) { return j.is_number_integer(); }
bool is_string(const Json& j) { return j.is_string(); }
bool is_object(const Json& j) { return j.is_object(); }
bool is_array(const Json& j) { return j.is_array(); }
bool is_id_or_null(const Json& j) { return j.is_null() || j.is_number_integer(); }
bool is_status_map(const Json& j) {
  if (!j.is_object()) return false;
  for (const auto& [k, v] : j.items())
    if (!v.is_string()) return false;
  return true;
}
bool is_pose(const Json& j) {
  return j.is_array() && j.size() == 3 && j[0].is_number() && j[1].is_number() && j[2].is_number();
}
bool is_control(const Json& j) {
  return j.is_object() && j.contains("vx") && j.contains("vy") && j.contains("omega") && j.at("vx").is_number() &&
         j.at("vy").is_number() && j.at("omega").is_number();
}

struct FieldRule {
  const char* name;
  Check check;
  const char* expected;
};

const FieldRule kHeaderFields[] = {
    {"format_version", is_integer, "integer"}, {"method", is_string, "string"},
    {"seed", is_integer, "integer"},           {"budget", is_number, "number"},
    {"target_count", is_integer, "integer"},   {"scenario", is_object, "object"},
    {"prior", is_array, "array"},              {"initial", is_object, "object"},
};

const FieldRule kTickFields[] = {
    {"tick", is_integer, "integer"},      {"t", is_number, "number"},
    {"pose", is_pose, "[x, y, heading]"}, {"floor", is_integer, "integer"},
    {"gait", is_string, "string"},        {"behavior", is_string, "string"},
    {"target", is_id_or_null, "id or null"}, {"u", is_control, "control object"},
    {"truth", is_status_map, "status map"},  {"belief", is_status_map, "status map"},
    {"inspected", is_integer, "integer"},    {"closest_sum", is_number, "number"},
    {"path_length", is_number, "number"},    {"score", is_number, "number"},
};

const FieldRule kEventFields[] = {{"tick", is_integer, "integer"}, {"kind", is_string, "string"}};

const FieldRule kEndFields[] = {
    {"tick", is_integer, "integer"},           {"t", is_number, "number"},
    {"reason", is_string, "string"},           {"inspected", is_integer, "integer"},
    {"closest_sum", is_number, "number"},      {"path_length", is_number, "number"},
    {"score", is_number, "number"},            {"stair_failures", is_integer, "integer"},
    {"tasks_completed", is_integer, "integer"},
};

const FieldRule kInitialFields[] = {
    {"inspected", is_integer, "integer"}, {"closest_sum", is_number, "number"},
    {"path_length", is_number, "number"}, {"score", is_number, "number"},
};

template <std::size_t N>
bool check_fields(const Json& j, const FieldRule (&rules)[N], const std::string& where,
                  std::vector<std::string>& errors) {
  bool ok = true;
  for (const auto& r : rules) {
    if (!j.contains(r.name)) {
      errors.push_back(where + ": missing " + r.name);
      ok = false;
    } else if (!r.check(j.at(r.name))) {
      errors.push_back(where + ": " + r.name + " should be " + r.expected);
      ok = false;
    }
  }
  return ok;
}

}  // namespace

std::vector<std::string> validate_trace(const std::string& text) {
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool header = false, ended = false;
  long last_tick = 0;
  double last_t = 0.0;
  int last_inspected = -1;
  while (std::getline(in, line)) {
    ++n;
    const std::string where = "line " + std::to_string(n);
    if (line.empty()) {
      errors.push_back(where + ": empty line");
      continue;
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      errors.push_back(where + ": not JSON");
      continue;
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
      errors.push_back(where + ": missing record type");
      continue;
    }
    const auto type = j.at("type").get<std::string>();
    if (ended) errors.push_back(where + ": record after the end record");
    if (n == 1 && type != "header") errors.push_back(where + ": first record must be the header");
    if (type == "header") {
      if (n != 1) errors.push_back(where + ": header must be the first record");
      header = true;
      if (!check_fields(j, kHeaderFields, where, errors)) continue;
      if (j.at("format_version").get<int>() != kTraceFormatVersion)
        errors.push_back(where + ": unsupported format_version");
      if (check_fields(j.at("initial"), kInitialFields, where + " initial", errors))
        last_inspected = j.at("initial").at("inspected").get<int>();
    } else if (type == "tick") {
      if (!check_fields(j, kTickFields, where, errors)) continue;
      const long k = j.at("tick").get<long>();
      const double t = j.at("t").get<double>();
      const int inspected = j.at("inspected").get<int>();
      if (k != last_tick + 1) errors.push_back(where + ": tick " + std::to_string(k) + " out of sequence");
      if (last_tick > 0 && !(t > last_t)) errors.push_back(where + ": time does not increase");
      if (inspected < last_inspected) errors.push_back(where + ": inspected count decreased");
      last_tick = k;
      last_t = t;
      last_inspected = inspected;
    } else if (type == "event") {
      if (!check_fields(j, kEventFields, where, errors)) continue;
      const long k = j.at("tick").get<long>();
      if (k < last_tick || k > last_tick + 1) errors.push_back(where + ": event tick out of place");
    } else if (type == "end") {
      ended = true;
      if (!check_fields(j, kEndFields, where, errors)) continue;
      if (j.at("tick").get<long>() != last_tick) errors.push_back(where + ": end tick differs from the last tick");
      if (last_inspected >= 0 && j.at("inspected").get<int>() != last_inspected)
        errors.push_back(where + ": end inspected count differs from the last tick");
    } else {
      errors.push_back(where + ": unknown record type '" + type + "'");
    }
  }
  if (!header) errors.push_back("missing header record");
  if (!ended) errors.push_back("missing end record");
  return errors;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("", "cannot write " + path.string());
  out << text;
}

}  // namespace sb2g
