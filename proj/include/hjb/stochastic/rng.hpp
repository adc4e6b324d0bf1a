#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hjb::stochastic {

struct RngSpec {
  std::uint64_t seed = 0;
};

// Recorded in path metadata and run summaries.
inline constexpr const char* kNormalMethod =
    "mt19937_64 per path seeded by splitmix64(splitmix64(seed) + path); "
    "53-bit uniforms; Marsaglia polar normals";

std::uint64_t splitmix64(std::uint64_t x);

// Seed of the stream owned by one path.
std::uint64_t stream_seed(const RngSpec& rng, std::uint64_t path);

// Noise source of a single path. The polar method is written out here because
// std::normal_distribution is not specified bit-for-bit across libraries.
class PathStream {
public:
  explicit PathStream(std::uint64_t seed) : engine_(seed) {}
  PathStream(const RngSpec& rng, std::uint64_t path) : engine_(stream_seed(rng, path)) {}

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();

  // Exponential with the given rate.
  double exponential(double rate);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Pairwise summation with a fixed split, so the result depends only on the
// order of the input.
double pairwise_sum(std::span<const double> values);

} // namespace hjb::stochastic
