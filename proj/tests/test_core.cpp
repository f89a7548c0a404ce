#include <doctest.h>

#include <stdexcept>

#include "augrl/policy.hpp"
#include "augrl/rng.hpp"
#include "augrl/trainer.hpp"

using namespace augrl;

TEST_CASE("default search space grids") {
  const SearchSpace s = default_search_space();
  CHECK(s.kinds.size() == 7);
  CHECK(s.counts == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(s.sizes == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(s.warps ==
        std::vector<int>{10, 15, 20, 25, 30, 35, 40, 45, 50, 55});
  CHECK(s.policy_length == 3);
  CHECK_FALSE(s.strict_distinct);
  validate(s);
}

TEST_CASE("standard op set is the first three kinds") {
  const SearchSpace s = standard_ops_search_space();
  CHECK(s.kinds == std::vector<OperationKind>{OperationKind::TimeMask,
                                              OperationKind::FreqMask,
                                              OperationKind::TimeWarp});
}

TEST_CASE("parse the example policy") {
  const Policy p =
      parse_policy("TimeWarp(W=20);MinTimeMsk(m=2,T=7);MaxFreqMsk(m=1,F=3)");
  REQUIRE(p.ops.size() == 3);
  CHECK(p.ops[0] == warp_op(20));
  CHECK(p.ops[1] == mask_op(OperationKind::MinTimeMask, 2, 7));
  CHECK(p.ops[2] == mask_op(OperationKind::MaxFreqMask, 1, 3));
  CHECK(format_policy(p) ==
        "TimeWarp(W=20);MinTimeMsk(m=2,T=7);MaxFreqMsk(m=1,F=3)");
}

TEST_CASE("repeated kinds are allowed by default") {
  const Policy p =
      parse_policy("TimeMsk(m=1,T=1);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)");
  CHECK(p.ops.size() == 3);
  SearchSpace strict = default_search_space();
  strict.strict_distinct = true;
  CHECK_THROWS_AS(
      parse_policy("TimeMsk(m=1,T=1);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)",
                   strict),
      std::invalid_argument);
}

TEST_CASE("parse errors carry the op position") {
  auto msg_of = [](const std::string& text) {
    try {
      parse_policy(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  // value outside the warp grid
  CHECK(msg_of("TimeWarp(W=11);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)")
            .find("policy op 1") == 0);
  // unknown kind name
  CHECK(msg_of("TimeMsk(m=1,T=1);TimeMask(m=1,T=1);TimeMsk(m=1,T=1)")
            .find("policy op 2") == 0);
  CHECK(msg_of("TimeMsk(m=1,T=1);TimeMask(m=1,T=1);TimeMsk(m=1,T=1)")
            .find("unknown kind") != std::string::npos);
  // wrong parameter set for the kind
  CHECK(msg_of("TimeMsk(m=1,T=1);TimeMsk(m=1,T=1);TimeWarp(m=1,T=1)")
            .find("policy op 3") == 0);
  // freq mask must use F
  CHECK(msg_of("FreqMsk(m=1,T=4);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)")
            .find("policy op 1") == 0);
  // wrong operation count
  CHECK_THROWS_AS(parse_policy("TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)"),
                  std::invalid_argument);
  // count outside grid
  CHECK(msg_of("TimeMsk(m=6,T=1);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)")
            .find("not in grid") != std::string::npos);
}

TEST_CASE("format/parse round-trip over random valid policies") {
  const SearchSpace space = default_search_space();
  SplitRng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const Policy p = uniform_random_policy(space, rng);
    validate(p, space);
    const Policy q = parse_policy(format_policy(p), space);
    CHECK(q == p);
    // grid closure: everything a parse accepts sits inside the grids
    validate(q, space);
  }
}

TEST_CASE("all-freq-mask policy formats as three FreqMsk terms") {
  const Policy p{{mask_op(OperationKind::FreqMask, 1, 2),
                  mask_op(OperationKind::FreqMask, 3, 4),
                  mask_op(OperationKind::FreqMask, 5, 6)}};
  CHECK(format_policy(p) ==
        "FreqMsk(m=1,F=2);FreqMsk(m=3,F=4);FreqMsk(m=5,F=6)");
}

TEST_CASE("search space validation rejects bad grids") {
  SearchSpace s = default_search_space();
  s.counts = {3, 2};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = default_search_space();
  s.sizes.clear();
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = default_search_space();
  s.policy_length = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}
