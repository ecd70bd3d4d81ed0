#ifndef SB2G_RNG_HPP
#define SB2G_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace sb2g {

/// SplitMix64 generator. Cheap to seed, so the planner forks one per tree
/// node; also used to derive substream seeds from the master seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (b * 0xD1B54A32D192ED03ULL));
  g();
  return g();
}

enum class Stream : std::uint64_t {
  motion = 1,
  detection = 2,
  measurement = 3,
  planner = 4,
  generator = 5,
  localization = 6
};

inline std::uint64_t stream_seed(std::uint64_t master, Stream s) {
  return mix_seed(master, static_cast<std::uint64_t>(s));
}

/// Named substreams fanned out from one master seed. Consuming one stream
/// never shifts another.
struct RngStreams {
  std::mt19937_64 motion;
  std::mt19937_64 detection;
  std::mt19937_64 measurement;
  std::mt19937_64 planner;
  std::mt19937_64 localization;

  explicit RngStreams(std::uint64_t master)
      : motion(stream_seed(master, Stream::motion)),
        detection(stream_seed(master, Stream::detection)),
        measurement(stream_seed(master, Stream::measurement)),
        planner(stream_seed(master, Stream::planner)),
        localization(stream_seed(master, Stream::localization)) {}
};

}  // namespace sb2g

#endif  // SB2G_RNG_HPP
