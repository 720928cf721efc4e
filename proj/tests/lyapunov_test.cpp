#include <sstream>

#include <doctest.h>

#include "qgossip/errors.hpp"
#include "qgossip/lyapunov.hpp"
#include "qgossip/rng.hpp"

using namespace qgossip;

TEST_CASE("sum decomposition floors toward minus infinity") {
  auto d = decompose_sum(7, 3);
  CHECK(d.quotient == 2);
  CHECK(d.remainder == 1);

  d = decompose_sum(-5, 3);
  CHECK(d.quotient == -2);
  CHECK(d.remainder == 1);

  d = decompose_sum(6, 3);
  CHECK(d.quotient == 2);
  CHECK(d.remainder == 0);

  std::mt19937_64 rng = derive_stream(1, 0);
  for (int k = 0; k < 2000; ++k) {
    const std::int64_t total = uniform_int(rng, -1000, 1000);
    const int n = static_cast<int>(uniform_int(rng, 1, 12));
    const auto lr = decompose_sum(total, n);
    CHECK(lr.quotient * n + lr.remainder == total);
    CHECK(lr.remainder >= 0);
    CHECK(lr.remainder < n);
  }
}

TEST_CASE("tracker initialization") {
  LyapunovState t = init_tracker({2, 0});
  CHECK(t.L == 1);
  CHECK(t.R == 0);
  CHECK(t.D == 2);
  CHECK(t.S_plus == 0);
  CHECK(t.S_minus == 0);
  CHECK(t.V == 2);

  t = init_tracker({1, 1, 1});
  CHECK(t.L == 1);
  CHECK(t.D == 0);
  CHECK(t.V == 0);

  t = init_tracker({2, 1, 1, 0});
  CHECK(t.L == 1);
  CHECK(t.R == 0);
  CHECK(t.D == 2);
  CHECK(t.V == 2);
}

TEST_CASE("the worked two-node descent drops V by exactly 2") {
  LyapunovState t = init_tracker({2, 0});

  // R3(i) at the receiver holding 2 > L: surplus counted positive, V flat
  t = apply_rule(t, {QaRule::R3i, 1, 2});
  CHECK(t.D == 1);
  CHECK(t.S_plus == 1);
  CHECK(t.S_minus == 0);
  CHECK(t.V == 2);

  // R2(i) at the receiver holding 0 < L with S_minus = 0: the one V drop
  t = apply_rule(t, {QaRule::R2i, 2, 0});
  CHECK(t.D == 0);
  CHECK(t.S_plus == 0);
  CHECK(t.V == 0);
}

TEST_CASE("rules without a state update leave the tracker alone") {
  const LyapunovState t0 = init_tracker({2, 0});
  for (const QaRule rule : {QaRule::R1i, QaRule::R1ii, QaRule::R2ii, QaRule::R3ii}) {
    const LyapunovState t = apply_rule(t0, {rule, 1, 2});
    CHECK(t.D == t0.D);
    CHECK(t.S_plus == t0.S_plus);
    CHECK(t.S_minus == t0.S_minus);
    CHECK(t.V == t0.V);
  }
}

TEST_CASE("counter underflow is reported as corruption") {
  const LyapunovState fresh = init_tracker({2, 0});
  // consumption cannot precede generation
  CHECK_THROWS_AS(apply_rule(fresh, {QaRule::R2i, 1, 2}), TrackerCorruptionError);
  CHECK_THROWS_AS(apply_rule(fresh, {QaRule::R2i, 2, 0}), TrackerCorruptionError);
}

TEST_CASE("lemma 4 clauses") {
  SUBCASE("absorbed state passes everything") {
    const LyapunovState t = init_tracker({1, 1});
    const Lemma4Check check = check_lemma4(t, {{1, 1}, {0, 0}});
    CHECK(check.lower_bound);
    CHECK(check.at_floor);
    CHECK(check.zero_error);
    CHECK(check.zero_remainder);
    CHECK(check.all());
  }
  SUBCASE("V == R with a state below L flags clause 2") {
    LyapunovState t;
    t.L = 1;
    t.R = 0;
    t.D = 0;
    t.V = 0;
    const Lemma4Check check = check_lemma4(t, {{0, 2}, {0, 0}});
    CHECK_FALSE(check.at_floor);
  }
  SUBCASE("mid-trajectory state from the worked descent passes clause 1") {
    LyapunovState t = init_tracker({2, 0});
    t = apply_rule(t, {QaRule::R3i, 1, 2});
    const Lemma4Check check = check_lemma4(t, {{1, 0}, {1, 0}});
    CHECK(check.lower_bound);
    CHECK(check.all());
  }
}

TEST_CASE("V upper bound formula") {
  CHECK(v_upper_bound(4, 0, 2, 0) == Rational(4));
  CHECK(v_upper_bound(2, 0, 2, 0) == Rational(2));
  CHECK(v_upper_bound(10, 0, 0, 3) == Rational(3));
  // tight at R = 0 with a half split: V(0) of [2,0] hits the bound
  CHECK(Rational(init_tracker({2, 0}).V) == v_upper_bound(2, 0, 2, 0));
  CHECK_THROWS_AS(v_upper_bound(4, 2, 0, 0), std::invalid_argument);
}

TEST_CASE("level-set membership") {
  LyapunovState t = init_tracker({2, 1, 1, 0});  // V = 2, R = 0
  CHECK(LevelSetQuery{1}.contains(t));
  CHECK(LevelSetQuery{1}.contains_zero_minus(t));
  CHECK_FALSE(LevelSetQuery{0}.contains(t));
  CHECK_FALSE(LevelSetQuery::remainder_level().contains(t));

  t.S_minus = 1;
  t.S_plus = 1;
  CHECK(LevelSetQuery{1}.contains(t));
  CHECK_FALSE(LevelSetQuery{1}.contains_zero_minus(t));
}

TEST_CASE("tracker trace emits one row per event") {
  std::ostringstream trace;
  LyapunovTracker tracker({2, 0});
  tracker.set_trace(&trace);
  tracker.on_rule({QaRule::R3i, 1, 2});
  tracker.on_rule({QaRule::R1ii, 2, 0});
  tracker.on_rule({QaRule::R2i, 2, 0});

  CHECK(trace.str() ==
        "k,rule,D,S_plus,S_minus,V\n"
        "1,R3i,1,1,0,2\n"
        "2,R1ii,1,1,0,2\n"
        "3,R2i,0,0,0,0\n");
  CHECK(tracker.steps() == 3);
}
