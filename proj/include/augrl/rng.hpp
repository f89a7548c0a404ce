#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace augrl {

// Seeded random stream, splittable into independent child streams by index.
// Every draw primitive is implemented on top of raw engine output so that a
// given (seed, call sequence) produces the same values on every platform;
// the standard library's distribution objects are deliberately not used.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed);

  // Independent child stream. split(i) and split(j) are decorrelated for
  // i != j; splitting does not consume state from the parent.
  SplitRng split(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Uniform integer on [lo, hi], inclusive, unbiased (rejection sampling).
  int uniform_int(int lo, int hi);

  // Box-Muller, two uniform draws per call.
  double gaussian(double mean, double sigma);

  // Fisher-Yates, deterministic given the stream state.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(
          uniform_int(0, static_cast<int>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace augrl
