#ifndef SB2G_TRACE_HPP
#define SB2G_TRACE_HPP

#include "sb2g/serialization.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sb2g {

constexpr int kTraceFormatVersion = 1;

/// Accumulates JSON-lines trace text.
class TraceWriter {
 public:
  void write(const Json& record);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

std::string sha256_hex(const std::string& data);

struct MetricsSample {
  double t = 0.0;
  int inspected = 0;
  double closest_sum = 0.0;
  double path_length = 0.0;
  double score = 0.0;
};

struct ParsedTrace {
  Json header;
  Json end;
  std::vector<Json> ticks;
  std::vector<Json> events;
  std::vector<MetricsSample> samples;  // one per tick record
};

/// Throws ScenarioError with a line number on malformed input.
ParsedTrace parse_trace(const std::string& text);
/// Checks a trace against the record schema: header first, consecutive
/// tick records with strictly increasing time and non-decreasing inspected
/// count, one end record last. Returns one message per problem.
std::vector<std::string> validate_trace(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sb2g

#endif  // SB2G_TRACE_HPP
