#include <algorithm>

#include <doctest.h>

#include "qgossip/errors.hpp"
#include "qgossip/protocol_qc.hpp"
#include "qgossip/rng.hpp"

using namespace qgossip;

TEST_CASE("qc update rules") {
  const QcPolicy adopt = QcPolicy::adopt();

  // R1: equal states, no update
  CHECK(qc_step({1, 1}, {1, 2}, adopt) == StateVector{1, 1});

  // R3 with unit gap is a singleton interval for any policy
  CHECK(qc_step({0, 1}, {1, 2}, adopt) == StateVector{0, 0});
  CHECK(qc_step({0, 1}, {1, 2}, QcPolicy::step()) == StateVector{0, 0});

  // R2 with ADOPT takes the sender's value
  CHECK(qc_step({0, 5}, {2, 1}, adopt) == StateVector{5, 5});

  // R2/R3 with STEP moves one unit toward the sender
  CHECK(qc_step({0, 5}, {2, 1}, QcPolicy::step()) == StateVector{1, 5});
  CHECK(qc_step({5, 0}, {2, 1}, QcPolicy::step()) == StateVector{4, 0});
}

TEST_CASE("policy violations are rejected per step") {
  const QcPolicy stay = QcPolicy::custom("stay", [](std::int64_t receiver, std::int64_t) {
    return receiver;  // never inside (x_i, x_j] or [x_j, x_i)
  });
  StateVector x{0, 5};
  CHECK_THROWS_AS(qc_step_inplace(x, {2, 1}, stay), PolicyViolationError);

  const QcPolicy overshoot = QcPolicy::custom("overshoot", [](std::int64_t, std::int64_t in) {
    return in + 1;
  });
  StateVector y{0, 5};
  CHECK_THROWS_AS(qc_step_inplace(y, {2, 1}, overshoot), PolicyViolationError);
}

TEST_CASE("consensus predicate") {
  CHECK(is_consensus({3, 3, 3}));
  CHECK_FALSE(is_consensus({1, 1, 0}));
  CHECK(is_consensus(StateVector(7, 0)));
}

TEST_CASE("interval stats") {
  auto s = interval_stats({1, 0, 1});
  CHECK(s.min == 0);
  CHECK(s.max == 1);
  CHECK(s.length == 1);

  s = interval_stats({5, 5});
  CHECK(s.min == 5);
  CHECK(s.max == 5);
  CHECK(s.length == 0);

  s = interval_stats({-2, 3, 0});
  CHECK(s.min == -2);
  CHECK(s.max == 3);
  CHECK(s.length == 5);
}

TEST_CASE("x1 states") {
  CHECK(x1_state(3, 1) == StateVector{1, 0, 0});
  CHECK(x1_state(4, 3) == StateVector{1, 1, 1, 0});
  CHECK(x1_state(2, 1) == StateVector{1, 0});
  CHECK_THROWS_AS(x1_state(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(x1_state(3, 3), std::invalid_argument);
}

TEST_CASE("two-node runs resolve in exactly one step") {
  const Digraph g = complete_digraph(2);
  const ActivationModel model = uniform_activation(g);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const QcRunResult result = run_qc(g, model, {1, 0}, QcPolicy::adopt(), seed);
    CHECK(result.steps == 1);
    CHECK(is_consensus(result.state));
  }
}

TEST_CASE("constant initial state needs zero steps") {
  const Digraph g = complete_digraph(3);
  const QcRunResult result = run_qc(g, uniform_activation(g), {4, 4, 4}, QcPolicy::adopt(), 1);
  CHECK(result.steps == 0);
}

TEST_CASE("unreachable topology warns and then fails to converge") {
  const Digraph disjoint(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}});
  const ActivationModel model = uniform_activation(disjoint);
  std::vector<std::string> warnings;
  CHECK_THROWS_AS(
      run_qc(disjoint, model, {0, 0, 1, 1}, QcPolicy::adopt(), 3, 500, &warnings),
      NonConvergenceError);
  REQUIRE(warnings.size() == 1);

  try {
    run_qc(disjoint, model, {0, 0, 1, 1}, QcPolicy::adopt(), 3, 500);
  } catch (const NonConvergenceError& e) {
    CHECK(e.steps_taken() == 500);
  }
}

TEST_CASE("trajectory invariants: hull, sender, interval, absorption") {
  const Digraph g = complete_digraph(5);
  const ActivationModel model = uniform_activation(g);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::mt19937_64 rng = derive_stream(900 + seed, 0);
    StateVector x(5);
    for (auto& v : x) v = uniform_int(rng, -3, 3);

    auto hull = interval_stats(x);
    for (int k = 0; k < 400; ++k) {
      const Edge edge = model.sample(rng);
      const StateVector before = x;
      qc_step_inplace(x, edge, QcPolicy::adopt());

      // sender untouched, non-participants untouched
      for (int i = 1; i <= 5; ++i) {
        if (i != edge.to) CHECK(x[static_cast<std::size_t>(i - 1)] ==
                                before[static_cast<std::size_t>(i - 1)]);
      }
      // receiver stays inside the mandated interval
      const std::int64_t xi = before[static_cast<std::size_t>(edge.to - 1)];
      const std::int64_t xj = before[static_cast<std::size_t>(edge.from - 1)];
      const std::int64_t v = x[static_cast<std::size_t>(edge.to - 1)];
      if (xi < xj) {
        CHECK(v > xi);
        CHECK(v <= xj);
      } else if (xi > xj) {
        CHECK(v >= xj);
        CHECK(v < xi);
      } else {
        CHECK(v == xi);
      }
      // monotone hull
      const auto next_hull = interval_stats(x);
      CHECK(next_hull.min >= hull.min);
      CHECK(next_hull.max <= hull.max);
      hull = next_hull;
    }
  }
}

TEST_CASE("consensus is absorbing") {
  const Digraph g = complete_digraph(4);
  const ActivationModel model = uniform_activation(g);
  StateVector x(4, 2);
  std::mt19937_64 rng = derive_stream(13, 0);
  for (int k = 0; k < 200; ++k) {
    qc_step_inplace(x, model.sample(rng), QcPolicy::adopt());
    CHECK(is_consensus(x));
  }
}

TEST_CASE("policies agree inside X_1 where every interval is a singleton") {
  const Digraph g = complete_digraph(6);
  const ActivationModel model = uniform_activation(g);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto adopt = run_qc(g, model, x1_state(6, 3), QcPolicy::adopt(), seed);
    const auto step = run_qc(g, model, x1_state(6, 3), QcPolicy::step(), seed);
    CHECK(adopt.steps == step.steps);
    CHECK(adopt.state == step.state);
  }
}

TEST_CASE("steps from X_1 flip at most one coordinate between 0 and 1") {
  const int n = 6;
  const Digraph g = complete_digraph(n);
  const ActivationModel model = uniform_activation(g);
  std::mt19937_64 rng = derive_stream(77, 0);
  for (int z = 1; z <= n - 1; ++z) {
    for (int k = 0; k < 500; ++k) {
      StateVector x = x1_state(n, z);
      const StateVector before = x;
      qc_step_inplace(x, model.sample(rng), QcPolicy::adopt());
      int flips = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK((x[i] == 0 || x[i] == 1));
        if (x[i] != before[i]) ++flips;
      }
      CHECK(flips <= 1);
    }
  }
}
