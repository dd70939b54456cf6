#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace qbc {

// Seeded generator owned by the caller. Uniform variates are built directly
// from the 64-bit engine output so sequences are identical across standard
// library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p);
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives independent, named sub-streams from one master seed, so a single
// session or sweep cell can be rerun in isolation.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }
  std::uint64_t seed_for(std::string_view name, std::uint64_t index = 0) const;
  Rng derive(std::string_view name, std::uint64_t index = 0) const {
    return Rng(seed_for(name, index));
  }

 private:
  std::uint64_t master_;
};

}  // namespace qbc
