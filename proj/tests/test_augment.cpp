#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "augrl/augment.hpp"

using namespace augrl;

namespace {

Spectrogram iota_spec(int t, int f) {
  Spectrogram s(t, f);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    s.values[i] = static_cast<float>(i);
  return s;
}

// Replays the documented draw order (per band: width, then start) to predict
// the exact masked index set of an apply_mask call.
std::set<int> replay_mask_indices(int axis_len, int count, int size_cap,
                                  SplitRng rng, bool fixed_width = false) {
  std::set<int> masked;
  for (int i = 0; i < count; ++i) {
    const int cap = std::min(size_cap, axis_len);
    const int w = fixed_width ? cap : rng.uniform_int(0, cap);
    const int start = rng.uniform_int(0, axis_len - w);
    for (int k = start; k < start + w; ++k) masked.insert(k);
  }
  return masked;
}

// Seed whose first draws under (cap, axis_len) give exactly (w, start).
std::uint64_t find_mask_seed(int axis_len, int cap, int want_w,
                             int want_start) {
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    SplitRng rng(seed);
    if (rng.uniform_int(0, cap) != want_w) continue;
    if (rng.uniform_int(0, axis_len - want_w) == want_start) return seed;
  }
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("constant spectrogram is unchanged by mean masking") {
  const Spectrogram s(6, 4, 3.25f);
  SplitRng rng(1);
  const Spectrogram out =
      apply_mask(s, MaskAxis::Time, 5, 10, FillMode::Mean, rng);
  CHECK(out == s);
}

TEST_CASE("time mask fills whole frames with the global statistic") {
  // 5x3 cells valued 0..14; global mean 7, max 14, min 0.
  const Spectrogram s = iota_spec(5, 3);
  const std::uint64_t seed = find_mask_seed(5, 2, /*w=*/2, /*start=*/1);

  SUBCASE("mean fill") {
    SplitRng rng(seed);
    const Spectrogram out =
        apply_mask(s, MaskAxis::Time, 1, 2, FillMode::Mean, rng);
    CHECK(out.n_time == 5);
    CHECK(out.n_freq == 3);
    for (int f = 0; f < 3; ++f) {
      CHECK(out.at(1, f) == 7.0f);
      CHECK(out.at(2, f) == 7.0f);
      CHECK(out.at(0, f) == s.at(0, f));
      CHECK(out.at(3, f) == s.at(3, f));
      CHECK(out.at(4, f) == s.at(4, f));
    }
  }
  SUBCASE("max fill") {
    SplitRng rng(seed);
    const Spectrogram out =
        apply_mask(s, MaskAxis::Time, 1, 2, FillMode::Max, rng);
    for (int f = 0; f < 3; ++f) CHECK(out.at(1, f) == 14.0f);
  }
  SUBCASE("min fill") {
    SplitRng rng(seed);
    const Spectrogram out =
        apply_mask(s, MaskAxis::Time, 1, 2, FillMode::Min, rng);
    for (int f = 0; f < 3; ++f) CHECK(out.at(2, f) == 0.0f);
  }
}

TEST_CASE("masked cells equal the fill statistic, others are untouched") {
  SplitRng outer(77);
  for (int trial = 0; trial < 200; ++trial) {
    SplitRng gen = outer.split(trial);
    const int t = gen.uniform_int(1, 12);
    const int f = gen.uniform_int(1, 12);
    Spectrogram s(t, f);
    for (auto& v : s.values)
      v = static_cast<float>(gen.gaussian(0.0, 2.0));
    const auto axis = gen.uniform_int(0, 1) ? MaskAxis::Time : MaskAxis::Freq;
    const int count = gen.uniform_int(1, 5);
    const int cap = gen.uniform_int(1, 10);
    const auto fill = static_cast<FillMode>(gen.uniform_int(0, 2));
    const int axis_len = axis == MaskAxis::Time ? t : f;

    SplitRng draw = outer.split(trial + 100000);
    const Spectrogram out = apply_mask(s, axis, count, cap, fill, draw);
    const auto masked =
        replay_mask_indices(axis_len, count, cap, outer.split(trial + 100000));
    CHECK(static_cast<int>(masked.size()) <= count * cap);

    const float stat = static_cast<float>(fill_value(s, fill));
    for (int ti = 0; ti < t; ++ti)
      for (int fi = 0; fi < f; ++fi) {
        const int along = axis == MaskAxis::Time ? ti : fi;
        if (masked.count(along))
          CHECK(out.at(ti, fi) == stat);
        else
          CHECK(out.at(ti, fi) == s.at(ti, fi));
      }
  }
}

TEST_CASE("fixed_width forces full-cap bands") {
  const Spectrogram s = iota_spec(8, 4);
  SplitRng rng(3);
  const Spectrogram out =
      apply_mask(s, MaskAxis::Freq, 1, 3, FillMode::Mean, rng, true);
  int changed_cols = 0;
  for (int fi = 0; fi < 4; ++fi) {
    bool changed = false;
    for (int ti = 0; ti < 8; ++ti) changed |= out.at(ti, fi) != s.at(ti, fi);
    changed_cols += changed;
  }
  CHECK(changed_cols == 3);
}

TEST_CASE("size cap larger than the axis is clamped") {
  const Spectrogram s = iota_spec(3, 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitRng rng(seed);
    const Spectrogram out =
        apply_mask(s, MaskAxis::Time, 1, 10, FillMode::Mean, rng);
    CHECK(out.n_time == 3);
  }
}

TEST_CASE("mask rejects bad input") {
  Spectrogram s = iota_spec(4, 4);
  SplitRng rng(1);
  CHECK_THROWS(apply_mask(s, MaskAxis::Time, 0, 2, FillMode::Mean, rng));
  CHECK_THROWS(apply_mask(s, MaskAxis::Time, 1, 0, FillMode::Mean, rng));
  s.values[3] = std::nanf("");
  CHECK_THROWS(apply_mask(s, MaskAxis::Time, 1, 2, FillMode::Mean, rng));
}

TEST_CASE("two-frame warp inserts the exact interpolation ramp") {
  Spectrogram s(2, 3);
  for (int f = 0; f < 3; ++f) {
    s.at(0, f) = 0.0f;
    s.at(1, f) = 1.0f;
  }
  SplitRng rng(9);  // t* is forced: uniform over {1..1}
  const Spectrogram out = time_warp(s, 10, rng);
  REQUIRE(out.n_time == 12);
  REQUIRE(out.n_freq == 3);
  for (int f = 0; f < 3; ++f) {
    CHECK(out.at(0, f) == 0.0f);
    CHECK(out.at(11, f) == 1.0f);
    for (int k = 1; k <= 10; ++k)
      CHECK(out.at(k, f) ==
            doctest::Approx(static_cast<double>(k) / 11.0).epsilon(1e-6));
  }
}

TEST_CASE("zero warp is the identity") {
  const Spectrogram s = iota_spec(4, 2);
  SplitRng rng(1);
  CHECK(time_warp(s, 0, rng) == s);
}

TEST_CASE("warp shape law and original-frame preservation") {
  SplitRng outer(55);
  const SearchSpace space = default_search_space();
  for (int trial = 0; trial < 200; ++trial) {
    SplitRng gen = outer.split(trial);
    const int t = gen.uniform_int(2, 30);
    const int f = gen.uniform_int(1, 8);
    Spectrogram s(t, f);
    for (auto& v : s.values)
      v = static_cast<float>(gen.gaussian(0.0, 1.0));
    const int warp =
        space.warps[gen.uniform_int(0, static_cast<int>(space.warps.size()) - 1)];

    SplitRng draw = outer.split(trial + 500000);
    const Spectrogram out = time_warp(s, warp, draw);
    CHECK(out.n_time == t + warp);
    CHECK(out.n_freq == f);

    SplitRng replay = outer.split(trial + 500000);
    const int t_star = replay.uniform_int(1, t - 1);
    for (int ti = 0; ti < t_star; ++ti)
      for (int fi = 0; fi < f; ++fi) CHECK(out.at(ti, fi) == s.at(ti, fi));
    for (int ti = t_star; ti < t; ++ti)
      for (int fi = 0; fi < f; ++fi)
        CHECK(out.at(ti + warp, fi) == s.at(ti, fi));
    for (int k = 1; k <= warp; ++k) {
      const double b = static_cast<double>(k) / (warp + 1);
      for (int fi = 0; fi < f; ++fi)
        CHECK(out.at(t_star - 1 + k, fi) ==
              doctest::Approx((1.0 - b) * s.at(t_star - 1, fi) +
                              b * s.at(t_star, fi))
                  .epsilon(1e-6));
    }
  }
}

TEST_CASE("warp rejects tiny inputs") {
  const Spectrogram s(1, 3, 1.0f);
  SplitRng rng(1);
  CHECK_THROWS(time_warp(s, 10, rng));
}

TEST_CASE("policy application follows the shape arithmetic") {
  const Policy footnote =
      parse_policy("TimeWarp(W=20);MinTimeMsk(m=2,T=7);MaxFreqMsk(m=1,F=3)");
  Spectrogram s(40, 20);
  SplitRng gen(8);
  for (auto& v : s.values) v = static_cast<float>(gen.gaussian(0.0, 1.0));

  const SearchSpace space = default_search_space();
  const Spectrogram out = apply_policy(s, footnote, SplitRng(4), &space);
  CHECK(out.n_time == 60);
  CHECK(out.n_freq == 20);

  const Policy masks = parse_policy(
      "TimeMsk(m=2,T=4);FreqMsk(m=1,F=5);MinFreqMsk(m=3,F=2)");
  const Spectrogram out2 = apply_policy(s, masks, SplitRng(4), &space);
  CHECK(out2.n_time == 40);
  CHECK(out2.n_freq == 20);

  // same (input, policy, seed) twice -> bitwise identical
  const Spectrogram a = apply_policy(s, footnote, SplitRng(17), &space);
  const Spectrogram b = apply_policy(s, footnote, SplitRng(17), &space);
  CHECK(a == b);
}

TEST_CASE("speed perturbation") {
  SUBCASE("alpha 1 is the identity") {
    const std::vector<double> x{0.5, -1.0, 2.0, 3.5};
    CHECK(speed_perturb(x, 1.0) == x);
  }
  SUBCASE("ramp at alpha 2") {
    std::vector<double> x(101);
    for (int i = 0; i < 101; ++i) x[i] = i;
    const auto y = speed_perturb(x, 2.0);
    REQUIRE(y.size() == 51);
    for (std::size_t n = 0; n < y.size(); ++n)
      CHECK(y[n] == doctest::Approx(2.0 * static_cast<double>(n)));
  }
  SUBCASE("speaker-independent factor set changes length as expected") {
    std::vector<double> x(101);
    for (int i = 0; i < 101; ++i) x[i] = i;
    CHECK(speed_perturb(x, 0.9).size() == 112);
    CHECK(speed_perturb(x, 1.0).size() == 101);
    CHECK(speed_perturb(x, 1.1).size() == 91);
    // interpolating a ramp stays exactly a ramp with slope alpha
    for (double alpha : {0.9, 1.1}) {
      const auto y = speed_perturb(x, alpha);
      for (std::size_t n = 0; n < y.size(); ++n)
        CHECK(y[n] == doctest::Approx(alpha * static_cast<double>(n)));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(speed_perturb({1.0, 2.0}, 0.0));
    CHECK_THROWS(speed_perturb({1.0, 2.0}, -1.0));
    CHECK_THROWS(speed_perturb({1.0}, 1.0));
  }
}
