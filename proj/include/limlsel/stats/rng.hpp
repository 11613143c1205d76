#pragma once

#include <cstdint>
#include <random>

namespace limlsel::stats {

// Seeded random stream. A (seed, stream_id) pair fully determines the draw
// sequence; distinct stream ids give independent streams. Single owner, never
// shared between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double bernoulli(double p);
  double gamma(double shape);
  double chi_squared(double df);
  double exponential();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace limlsel::stats
