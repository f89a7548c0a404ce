#include <doctest.h>

#include <set>

#include "augrl/rng.hpp"

using augrl::SplitRng;

TEST_CASE("same seed, same sequence") {
  SplitRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams differ from parent and each other") {
  SplitRng root(7);
  SplitRng s0 = root.split(0);
  SplitRng s1 = root.split(1);
  SplitRng s0b = root.split(0);
  CHECK(s0.next_u64() != s1.next_u64());
  SplitRng s0c = root.split(0);
  CHECK(s0b.next_u64() == s0c.next_u64());
  // splitting leaves the parent stream untouched
  SplitRng r1(7), r2(7);
  (void)r1.split(3);
  CHECK(r1.next_u64() == r2.next_u64());
}

TEST_CASE("uniform_int stays in bounds and hits every value") {
  SplitRng rng(123);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(2, 9);
    CHECK(v >= 2);
    CHECK(v <= 9);
    seen.insert(v);
  }
  CHECK(seen.size() == 8);
  CHECK(rng.uniform_int(5, 5) == 5);
}

TEST_CASE("uniform in [0,1) with sane mean") {
  SplitRng rng(99);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("gaussian moments") {
  SplitRng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian(1.0, 2.0);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("shuffle is a permutation and seed-stable") {
  SplitRng a(11), b(11);
  std::vector<int> va(20), vb(20);
  for (int i = 0; i < 20; ++i) va[i] = vb[i] = i;
  a.shuffle(va);
  b.shuffle(vb);
  CHECK(va == vb);
  std::set<int> s(va.begin(), va.end());
  CHECK(s.size() == 20);
}
