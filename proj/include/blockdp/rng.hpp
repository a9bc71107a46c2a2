#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace blockdp {

// splitmix64 step. Small, fast, and good enough to decorrelate seed streams;
// also used to expand a single user seed into per-component engine seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from (base, stream, tag). Distinct tags
// give unrelated streams even when base and stream collide, so one user seed
// can drive data generation, mechanism noise, and analyst choices without
// accidental coupling.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream, std::string_view tag);

// Seeded generator with the handful of draws the simulator needs. All
// distributions are implemented directly on top of the raw 64-bit stream so
// that sequences are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1): never returns 0, safe as input to log().
  double open01();

  double uniform(double lo, double hi);

  bool bernoulli(double p);

  // Unbiased integer on [lo, hi] inclusive, via rejection.
  int uniform_int(int lo, int hi);

  // Laplace(0, scale) by inverse CDF on a symmetric open-interval uniform.
  double laplace(double scale);

  // Standard normal via Box-Muller on open-interval uniforms.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace blockdp
