#include "blockdp/rng.hpp"

#include <cmath>

#include "blockdp/errors.hpp"

namespace blockdp {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream, std::string_view tag) {
  std::uint64_t state = base;
  splitmix64(state);
  state ^= stream * 0xda942042e4dd58b5ULL;
  splitmix64(state);
  for (unsigned char ch : tag) {
    state ^= ch;
    splitmix64(state);
  }
  return splitmix64(state);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::open01() {
  // (k + 0.5) / 2^53 lies strictly inside (0, 1) for k in [0, 2^53).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw SpecError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<int>(draw % span);
}

double Rng::laplace(double scale) {
  if (!(scale > 0.0)) throw SpecError("laplace: scale must be positive");
  // u is symmetric around 0 on (-0.5, 0.5); inverse CDF keeps both tails.
  const double u = open01() - 0.5;
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

double Rng::normal() {
  const double u1 = open01();
  const double u2 = open01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace blockdp
