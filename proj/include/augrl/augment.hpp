#pragma once

#include <vector>

#include "augrl/policy.hpp"
#include "augrl/rng.hpp"
#include "augrl/spectrogram.hpp"

namespace augrl {

// Which axis a mask band covers.
enum class MaskAxis { Time, Freq };

// What replaces the masked cells: the utterance-level mean, maximum or
// minimum of the pre-mask spectrogram.
enum class FillMode { Mean, Max, Min };

MaskAxis axis_of(OperationKind k);      // throws for TimeWarp
FillMode fill_mode_of(OperationKind k); // throws for TimeWarp

// Utterance-level fill statistic over all cells of s.
double fill_value(const Spectrogram& s, FillMode mode);

// Places `count` bands along the given axis. Draw order per band: width w
// uniform on {0..min(size_cap, L)}, then start uniform on {0..L-w}, where L
// is the axis length. Bands may overlap; every masked cell is set to the
// fill statistic of the ORIGINAL spectrogram. fixed_width forces
// w = min(size_cap, L).
Spectrogram apply_mask(const Spectrogram& s, MaskAxis axis, int count,
                       int size_cap, FillMode fill, SplitRng& rng,
                       bool fixed_width = false);

// Inserts `warp` linearly interpolated frames between frames t*-1 and t*,
// with t* drawn uniformly on {1..n_time-1}. Inserted frame k of {1..warp}
// is frame(t*-1)*(1-k/(warp+1)) + frame(t*)*(k/(warp+1)). warp == 0 returns
// a copy (used by tests); warp > 0 requires n_time >= 2.
Spectrogram time_warp(const Spectrogram& s, int warp, SplitRng& rng);

// Applies p.ops left to right; op i consumes rng.split(i). When a space is
// given the policy is validated against it first.
Spectrogram apply_policy(const Spectrogram& s, const Policy& p, SplitRng rng,
                         const SearchSpace* space = nullptr,
                         bool fixed_width = false);

// Time-domain resampling y[n] = x(n*alpha) by linear interpolation; output
// length floor((len-1)/alpha) + 1.
std::vector<double> speed_perturb(const std::vector<double>& x, double alpha);

}  // namespace augrl
