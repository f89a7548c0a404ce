#include "augrl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace augrl {

void validate(const Spectrogram& s) {
  if (s.n_time < 1 || s.n_freq < 1)
    throw std::invalid_argument("spectrogram: n_time and n_freq must be >= 1");
  if (s.values.size() != static_cast<std::size_t>(s.n_time) * s.n_freq)
    throw std::invalid_argument("spectrogram: value count mismatches shape");
  for (float v : s.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("spectrogram: non-finite cell");
}

MaskAxis axis_of(OperationKind k) {
  if (is_warp_kind(k)) throw std::invalid_argument("axis_of: TimeWarp");
  return is_time_axis(k) ? MaskAxis::Time : MaskAxis::Freq;
}

FillMode fill_mode_of(OperationKind k) {
  switch (k) {
    case OperationKind::TimeMask:
    case OperationKind::FreqMask:
      return FillMode::Mean;
    case OperationKind::MaxTimeMask:
    case OperationKind::MaxFreqMask:
      return FillMode::Max;
    case OperationKind::MinTimeMask:
    case OperationKind::MinFreqMask:
      return FillMode::Min;
    case OperationKind::TimeWarp:
      break;
  }
  throw std::invalid_argument("fill_mode_of: TimeWarp");
}

double fill_value(const Spectrogram& s, FillMode mode) {
  switch (mode) {
    case FillMode::Mean: {
      double sum = 0.0;
      for (float v : s.values) sum += v;
      return sum / static_cast<double>(s.values.size());
    }
    case FillMode::Max:
      return *std::max_element(s.values.begin(), s.values.end());
    case FillMode::Min:
      return *std::min_element(s.values.begin(), s.values.end());
  }
  throw std::logic_error("fill_value: bad mode");
}

Spectrogram apply_mask(const Spectrogram& s, MaskAxis axis, int count,
                       int size_cap, FillMode fill, SplitRng& rng,
                       bool fixed_width) {
  validate(s);
  if (count < 1) throw std::invalid_argument("apply_mask: count < 1");
  if (size_cap < 1) throw std::invalid_argument("apply_mask: size_cap < 1");

  const int axis_len = axis == MaskAxis::Time ? s.n_time : s.n_freq;
  const float stat = static_cast<float>(fill_value(s, fill));

  Spectrogram out = s;
  for (int i = 0; i < count; ++i) {
    const int cap = std::min(size_cap, axis_len);
    const int w = fixed_width ? cap : rng.uniform_int(0, cap);
    const int start = rng.uniform_int(0, axis_len - w);
    if (w == 0) continue;
    if (axis == MaskAxis::Time) {
      for (int t = start; t < start + w; ++t)
        for (int f = 0; f < s.n_freq; ++f) out.at(t, f) = stat;
    } else {
      for (int t = 0; t < s.n_time; ++t)
        for (int f = start; f < start + w; ++f) out.at(t, f) = stat;
    }
  }
  return out;
}

Spectrogram time_warp(const Spectrogram& s, int warp, SplitRng& rng) {
  validate(s);
  if (warp < 0) throw std::invalid_argument("time_warp: negative warp");
  if (warp == 0) return s;
  if (s.n_time < 2)
    throw std::invalid_argument("time_warp: needs n_time >= 2");

  const int t_star = rng.uniform_int(1, s.n_time - 1);

  Spectrogram out(s.n_time + warp, s.n_freq);
  int row = 0;
  for (int t = 0; t < t_star; ++t, ++row)
    for (int f = 0; f < s.n_freq; ++f) out.at(row, f) = s.at(t, f);
  for (int k = 1; k <= warp; ++k, ++row) {
    const double b = static_cast<double>(k) / (warp + 1);
    for (int f = 0; f < s.n_freq; ++f)
      out.at(row, f) = static_cast<float>(
          (1.0 - b) * s.at(t_star - 1, f) + b * s.at(t_star, f));
  }
  for (int t = t_star; t < s.n_time; ++t, ++row)
    for (int f = 0; f < s.n_freq; ++f) out.at(row, f) = s.at(t, f);
  return out;
}

Spectrogram apply_policy(const Spectrogram& s, const Policy& p, SplitRng rng,
                         const SearchSpace* space, bool fixed_width) {
  if (space) validate(p, *space);
  Spectrogram cur = s;
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    SplitRng sub = rng.split(i);
    const auto& op = p.ops[i];
    if (is_warp_kind(op.kind)) {
      cur = time_warp(cur, op.warp, sub);
    } else {
      cur = apply_mask(cur, axis_of(op.kind), op.count, op.size,
                       fill_mode_of(op.kind), sub, fixed_width);
    }
  }
  return cur;
}

std::vector<double> speed_perturb(const std::vector<double>& x, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("speed_perturb: alpha <= 0");
  if (x.size() < 2)
    throw std::invalid_argument("speed_perturb: need at least 2 samples");
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("speed_perturb: non-finite sample");

  const std::size_t n_in = x.size();
  const auto n_out = static_cast<std::size_t>(
                         std::floor(static_cast<double>(n_in - 1) / alpha)) +
                     1;
  std::vector<double> y(n_out);
  for (std::size_t n = 0; n < n_out; ++n) {
    const double pos = static_cast<double>(n) * alpha;
    auto k = static_cast<std::size_t>(std::floor(pos));
    if (k >= n_in - 1) k = n_in - 2;
    const double frac = pos - static_cast<double>(k);
    y[n] = x[k] + frac * (x[k + 1] - x[k]);
  }
  return y;
}

}  // namespace augrl
