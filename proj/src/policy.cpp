#include "augrl/policy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace augrl {

bool is_warp_kind(OperationKind k) { return k == OperationKind::TimeWarp; }

bool is_time_axis(OperationKind k) {
  switch (k) {
    case OperationKind::TimeMask:
    case OperationKind::MaxTimeMask:
    case OperationKind::MinTimeMask:
      return true;
    default:
      return false;
  }
}

const char* kind_name(OperationKind k) {
  switch (k) {
    case OperationKind::TimeMask: return "TimeMsk";
    case OperationKind::FreqMask: return "FreqMsk";
    case OperationKind::TimeWarp: return "TimeWarp";
    case OperationKind::MaxTimeMask: return "MaxTimeMsk";
    case OperationKind::MaxFreqMask: return "MaxFreqMsk";
    case OperationKind::MinTimeMask: return "MinTimeMsk";
    case OperationKind::MinFreqMask: return "MinFreqMsk";
  }
  throw std::logic_error("kind_name: bad kind");
}

OperationSpec mask_op(OperationKind kind, int count, int size) {
  if (is_warp_kind(kind)) throw std::invalid_argument("mask_op: TimeWarp");
  OperationSpec op;
  op.kind = kind;
  op.count = count;
  op.size = size;
  return op;
}

OperationSpec warp_op(int warp) {
  OperationSpec op;
  op.kind = OperationKind::TimeWarp;
  op.warp = warp;
  return op;
}

SearchSpace default_search_space() {
  SearchSpace s;
  s.kinds = {OperationKind::TimeMask,    OperationKind::FreqMask,
             OperationKind::TimeWarp,    OperationKind::MaxTimeMask,
             OperationKind::MaxFreqMask, OperationKind::MinTimeMask,
             OperationKind::MinFreqMask};
  s.counts = {1, 2, 3, 4, 5};
  s.sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  s.warps = {10, 15, 20, 25, 30, 35, 40, 45, 50, 55};
  s.policy_length = 3;
  return s;
}

SearchSpace standard_ops_search_space() {
  SearchSpace s = default_search_space();
  s.kinds = {OperationKind::TimeMask, OperationKind::FreqMask,
             OperationKind::TimeWarp};
  return s;
}

namespace {

bool in_grid(const std::vector<int>& grid, int v) {
  return std::find(grid.begin(), grid.end(), v) != grid.end();
}

bool has_kind(const SearchSpace& space, OperationKind k) {
  return std::find(space.kinds.begin(), space.kinds.end(), k) !=
         space.kinds.end();
}

void check_grid(const std::vector<int>& grid, const char* what) {
  if (grid.empty())
    throw std::invalid_argument(std::string("search space: empty ") + what +
                                " grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i] >= grid[i + 1])
      throw std::invalid_argument(std::string("search space: ") + what +
                                  " grid not strictly increasing");
}

[[noreturn]] void op_error(int pos, const std::string& msg) {
  throw std::invalid_argument("policy op " + std::to_string(pos) + ": " + msg);
}

}  // namespace

void validate(const SearchSpace& space) {
  if (space.kinds.empty())
    throw std::invalid_argument("search space: no operation kinds");
  check_grid(space.counts, "count");
  check_grid(space.sizes, "size");
  bool has_warp = false;
  for (auto k : space.kinds) has_warp = has_warp || is_warp_kind(k);
  if (has_warp) check_grid(space.warps, "warp");
  if (space.policy_length < 1)
    throw std::invalid_argument("search space: policy_length < 1");
  if (space.strict_distinct &&
      space.policy_length > static_cast<int>(space.kinds.size()))
    throw std::invalid_argument(
        "search space: strict_distinct needs policy_length <= #kinds");
}

void validate(const OperationSpec& op, const SearchSpace& space) {
  if (!has_kind(space, op.kind))
    throw std::invalid_argument(std::string("operation kind ") +
                                kind_name(op.kind) + " not in search space");
  if (is_warp_kind(op.kind)) {
    if (op.count != 0 || op.size != 0)
      throw std::invalid_argument("TimeWarp carries no count/size");
    if (!in_grid(space.warps, op.warp))
      throw std::invalid_argument("warp value " + std::to_string(op.warp) +
                                  " not in grid");
  } else {
    if (op.warp != 0)
      throw std::invalid_argument("mask operation carries no warp");
    if (!in_grid(space.counts, op.count))
      throw std::invalid_argument("mask count " + std::to_string(op.count) +
                                  " not in grid");
    if (!in_grid(space.sizes, op.size))
      throw std::invalid_argument("mask size " + std::to_string(op.size) +
                                  " not in grid");
  }
}

void validate(const Policy& p, const SearchSpace& space) {
  if (static_cast<int>(p.ops.size()) != space.policy_length)
    throw std::invalid_argument(
        "policy has " + std::to_string(p.ops.size()) + " ops, expected " +
        std::to_string(space.policy_length));
  std::vector<OperationKind> seen;
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    try {
      validate(p.ops[i], space);
    } catch (const std::invalid_argument& e) {
      op_error(static_cast<int>(i) + 1, e.what());
    }
    if (space.strict_distinct) {
      if (std::find(seen.begin(), seen.end(), p.ops[i].kind) != seen.end())
        op_error(static_cast<int>(i) + 1, "repeated kind under strict_distinct");
      seen.push_back(p.ops[i].kind);
    }
  }
}

namespace {

OperationKind kind_from_name(const std::string& name, int pos) {
  for (int k = 0; k < kNumOperationKinds; ++k) {
    const auto kind = static_cast<OperationKind>(k);
    if (name == kind_name(kind)) return kind;
  }
  op_error(pos, "unknown kind '" + name + "'");
}

// One "Name(k=v,...)" term. Whitespace around tokens is tolerated on input;
// format_policy never emits any.
OperationSpec parse_term(const std::string& term, int pos,
                         const SearchSpace& space) {
  const auto open = term.find('(');
  const auto close = term.rfind(')');
  if (open == std::string::npos || close == std::string::npos ||
      close < open || close + 1 != term.size())
    op_error(pos, "expected Kind(key=value,...) in '" + term + "'");

  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  const OperationKind kind = kind_from_name(trim(term.substr(0, open)), pos);

  std::vector<std::pair<std::string, int>> params;
  std::string inner = term.substr(open + 1, close - open - 1);
  std::stringstream ss(inner);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    const auto eq = piece.find('=');
    if (eq == std::string::npos)
      op_error(pos, "expected key=value in '" + piece + "'");
    const std::string key = trim(piece.substr(0, eq));
    const std::string val = trim(piece.substr(eq + 1));
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(val, &used);
    } catch (const std::exception&) {
      op_error(pos, "bad integer '" + val + "' for " + key);
    }
    if (used != val.size() || value <= 0)
      op_error(pos, "bad integer '" + val + "' for " + key);
    params.emplace_back(key, value);
  }

  OperationSpec op;
  op.kind = kind;
  if (is_warp_kind(kind)) {
    if (params.size() != 1 || params[0].first != "W")
      op_error(pos, "TimeWarp takes exactly (W=value)");
    op.warp = params[0].second;
  } else {
    const std::string size_key = is_time_axis(kind) ? "T" : "F";
    if (params.size() != 2 || params[0].first != "m" ||
        params[1].first != size_key)
      op_error(pos, std::string(kind_name(kind)) + " takes exactly (m=...," +
                        size_key + "=...)");
    op.count = params[0].second;
    op.size = params[1].second;
  }
  try {
    validate(op, space);
  } catch (const std::invalid_argument& e) {
    op_error(pos, e.what());
  }
  return op;
}

}  // namespace

Policy parse_policy(const std::string& text, const SearchSpace& space) {
  Policy p;
  std::stringstream ss(text);
  std::string term;
  int pos = 0;
  while (std::getline(ss, term, ';')) {
    ++pos;
    if (term.find_first_not_of(" \t") == std::string::npos)
      op_error(pos, "empty operation term");
    p.ops.push_back(parse_term(term, pos, space));
  }
  if (static_cast<int>(p.ops.size()) != space.policy_length)
    throw std::invalid_argument(
        "policy has " + std::to_string(p.ops.size()) + " ops, expected " +
        std::to_string(space.policy_length));
  if (space.strict_distinct) validate(p, space);
  return p;
}

Policy parse_policy(const std::string& text) {
  return parse_policy(text, default_search_space());
}

std::string format_policy(const Policy& p) {
  std::string out;
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    const auto& op = p.ops[i];
    if (i) out += ';';
    out += kind_name(op.kind);
    if (is_warp_kind(op.kind)) {
      out += "(W=" + std::to_string(op.warp) + ")";
    } else {
      out += "(m=" + std::to_string(op.count) + ",";
      out += is_time_axis(op.kind) ? "T=" : "F=";
      out += std::to_string(op.size) + ")";
    }
  }
  return out;
}

}  // namespace augrl
