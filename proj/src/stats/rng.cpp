#include "limlsel/stats/rng.hpp"

#include <array>

namespace limlsel::stats {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream_id * 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(state);
  const std::uint64_t c = splitmix64(state);
  std::array<std::uint32_t, 8> words{};
  for (int i = 0; i < 2; ++i) {
    words[i] = static_cast<std::uint32_t>(a >> (32 * i));
    words[2 + i] = static_cast<std::uint32_t>(b >> (32 * i));
    words[4 + i] = static_cast<std::uint32_t>(c >> (32 * i));
    words[6 + i] = static_cast<std::uint32_t>(stream_id >> (32 * i));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::uniform() {
  // 53 random bits mapped to the midpoints of a 2^-53 grid: never 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

double RngStream::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

double RngStream::chi_squared(double df) {
  return std::chi_squared_distribution<double>(df)(engine_);
}

double RngStream::exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

}  // namespace limlsel::stats
