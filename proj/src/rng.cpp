#include "augrl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace augrl {

namespace {

// splitmix64 finalizer; good avalanche, cheap.
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed) : key_(seed), engine_(mix64(seed)) {}

SplitRng SplitRng::split(std::uint64_t index) const {
  return SplitRng(mix64(key_) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t SplitRng::next_u64() { return engine_(); }

double SplitRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int SplitRng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) -
                             static_cast<std::uint64_t>(lo) + 1;
  // Rejection sampling over the largest multiple of span below 2^64.
  const std::uint64_t limit = (0ULL - span) % span;  // 2^64 mod span
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < limit);
  return lo + static_cast<int>(x % span);
}

double SplitRng::gaussian(double mean, double sigma) {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace augrl
