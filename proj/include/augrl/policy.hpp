#pragma once

#include <string>
#include <vector>

namespace augrl {

// The seven deformation operations, in table order. TimeMask..TimeWarp are
// the standard SpecAugment set; the Max/Min variants fill with the utterance
// maximum/minimum instead of the mean.
enum class OperationKind {
  TimeMask,
  FreqMask,
  TimeWarp,
  MaxTimeMask,
  MaxFreqMask,
  MinTimeMask,
  MinFreqMask,
};

inline constexpr int kNumOperationKinds = 7;

bool is_warp_kind(OperationKind k);
bool is_time_axis(OperationKind k);  // false => frequency axis; warp excluded
const char* kind_name(OperationKind k);

// One parameterized operation. Mask kinds carry (count, size); TimeWarp
// carries warp only. Unused fields stay 0.
struct OperationSpec {
  OperationKind kind = OperationKind::TimeMask;
  int count = 0;
  int size = 0;
  int warp = 0;

  bool operator==(const OperationSpec&) const = default;
};

OperationSpec mask_op(OperationKind kind, int count, int size);
OperationSpec warp_op(int warp);

// Ordered operation sequence; applied left to right.
struct Policy {
  std::vector<OperationSpec> ops;

  bool operator==(const Policy&) const = default;
};

// Allowed operation kinds and the value grids shared by them. The default
// grids are the UASpeech search ranges; `kinds` may be restricted (e.g. the
// standard three-operation set) and the grids swapped for reduced spaces.
struct SearchSpace {
  std::vector<OperationKind> kinds;
  std::vector<int> counts;
  std::vector<int> sizes;
  std::vector<int> warps;
  int policy_length = 3;
  bool strict_distinct = false;  // forbid repeated kinds within one policy
};

SearchSpace default_search_space();
// Kinds restricted to {TimeMask, FreqMask, TimeWarp}; grids unchanged.
SearchSpace standard_ops_search_space();

void validate(const SearchSpace& space);

// Throws std::invalid_argument naming the offending op if any value falls
// outside the space grids, the parameter set mismatches the kind, the length
// differs from space.policy_length, or (strict_distinct) a kind repeats.
void validate(const OperationSpec& op, const SearchSpace& space);
void validate(const Policy& p, const SearchSpace& space);

// Text grammar, e.g. "TimeWarp(W=20);MinTimeMsk(m=2,T=7);MaxFreqMsk(m=1,F=3)".
// Count key is always "m"; size key is "T" on the time axis and "F" on the
// frequency axis; warp key is "W". Errors name the 1-based op position.
Policy parse_policy(const std::string& text, const SearchSpace& space);
Policy parse_policy(const std::string& text);  // default_search_space()
std::string format_policy(const Policy& p);

}  // namespace augrl
