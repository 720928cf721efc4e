#include <cmath>
#include <sstream>

#include <doctest.h>

#include "qgossip/errors.hpp"
#include "qgossip/markov.hpp"
#include "qgossip/rng.hpp"

using namespace qgossip;

TEST_CASE("hitting-time solver on elementary chains") {
  SUBCASE("one transient state, exit with probability 1") {
    ChainSpec chain{{"a", "b"}, {{0.0, 1.0}, {0.0, 1.0}}, {1}};
    const auto e = solve_hitting_times(chain);
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == 0.0);
  }
  SUBCASE("geometric: self-loop 0.5") {
    ChainSpec chain{{"a", "b"}, {{0.5, 0.5}, {0.0, 1.0}}, {1}};
    CHECK(solve_hitting_times(chain)[0] == doctest::Approx(2.0));
  }
  SUBCASE("chain I at n = 3 with uniform thirds") {
    const auto spec = to_chain_spec(build_chain_i_qc(3));
    const auto e = solve_hitting_times(spec);
    CHECK(e[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e[2] == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("unreachable or absorbing-elsewhere structures are rejected") {
  SUBCASE("target unreachable") {
    ChainSpec chain{{"a", "b"}, {{1.0, 0.0}, {0.0, 1.0}}, {1}};
    CHECK_THROWS_AS(solve_hitting_times(chain), NoFiniteHittingTimeError);
  }
  SUBCASE("absorbing non-target state") {
    ChainSpec chain{{"a", "sink", "goal"},
                    {{0.0, 0.5, 0.5}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
                    {2}};
    CHECK_THROWS_AS(solve_hitting_times(chain), NoFiniteHittingTimeError);
  }
}

TEST_CASE("chain validation") {
  ChainSpec bad_sum{{"a"}, {{0.9}}, {0}};
  CHECK_THROWS_AS(validate_chain(bad_sum), std::invalid_argument);
  ChainSpec negative{{"a", "b"}, {{1.5, -0.5}, {0.0, 1.0}}, {1}};
  CHECK_THROWS_AS(validate_chain(negative), std::invalid_argument);
  ChainSpec no_target{{"a"}, {{1.0}}, {}};
  CHECK_THROWS_AS(validate_chain(no_target), std::invalid_argument);
}

TEST_CASE("chain I closed form") {
  SUBCASE("two nodes") {
    ChainIParams c{2, {0.5}, {0.5}};
    CHECK(chain_i_closed_form(c, 1) == doctest::Approx(1.0));
  }
  SUBCASE("uniform thirds") {
    ChainIParams c{3, {1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3}};
    CHECK(chain_i_closed_form(c, 1) == doctest::Approx(3.0));
  }
  SUBCASE("symmetry under z <-> n-z with uniform rates") {
    ChainIParams c{8, std::vector<double>(7, 0.25), std::vector<double>(7, 0.25)};
    for (int z = 1; z <= 7; ++z) {
      CHECK(chain_i_closed_form(c, z) == doctest::Approx(chain_i_closed_form(c, 8 - z)));
    }
  }
  SUBCASE("hypothesis violation") {
    ChainIParams c{2, {0.5}, {0.4}};
    CHECK_THROWS_AS(chain_i_closed_form(c, 1), HypothesisViolationError);
  }
}

TEST_CASE("chain II closed form") {
  SUBCASE("worked three-state instance") {
    ChainIIParams c{3, {0.5, 0.5}, {0.25}};
    CHECK(chain_ii_closed_form(c, 2) == doctest::Approx(3.0));
    CHECK(chain_ii_closed_form(c, 1) == doctest::Approx(5.0));
  }
  SUBCASE("pure forward chain telescopes") {
    ChainIIParams c{5, {0.5, 0.25, 0.2, 0.4}, {0.0, 0.0, 0.0}};
    for (int z = 1; z <= 4; ++z) {
      double expected = 0;
      for (int j = z; j <= 4; ++j) expected += 1.0 / c.p[static_cast<std::size_t>(j - 1)];
      CHECK(chain_ii_closed_form(c, z) == doctest::Approx(expected));
    }
  }
  SUBCASE("two states is geometric") {
    ChainIIParams c{2, {0.125}, {}};
    CHECK(chain_ii_closed_form(c, 1) == doctest::Approx(8.0));
  }
  SUBCASE("zero forward probability is a division error") {
    ChainIIParams c{3, {0.5, 0.0}, {0.25}};
    CHECK_THROWS_AS(chain_ii_closed_form(c, 1), std::domain_error);
  }
}

TEST_CASE("chain III closed form and lower-row bound") {
  SUBCASE("worked instance") {
    ChainIIIParams c{3, {1.0 / 3, 0.25}, {0.25}, {1.0 / 3, 0.25}};
    const auto [exact_upper, bound] = chain_iii_closed_form(c);
    CHECK(exact_upper == doctest::Approx(14.0));
    CHECK(bound == doctest::Approx(28.0));

    const auto solved = solve_hitting_times(to_chain_spec(c));
    CHECK(solved[0] == doctest::Approx(18.75));
    CHECK(solved[1] == doctest::Approx(20.5));
    CHECK(solved[2] == doctest::Approx(14.0));
    CHECK(solved[3] == doctest::Approx(19.25));
    CHECK(solved[3] < bound);
  }
  SUBCASE("no backward transitions") {
    // with every q_i = 0 the formula collapses to 2/p_{n-1}; the solver on
    // the same structure confirms it
    ChainIIIParams c{4, {0.3, 0.25, 0.2}, {0.0, 0.0}, {0.1, 0.1, 0.25}};
    const auto [exact_upper, bound] = chain_iii_closed_form(c);
    CHECK(exact_upper == doctest::Approx(2.0 / 0.2));
    const auto solved = solve_hitting_times(to_chain_spec(c));
    CHECK(solved[2 * (4 - 2)] == doctest::Approx(exact_upper));
    CHECK(bound == doctest::Approx((1.0 + 0.2 / 0.25) * exact_upper));
  }
  SUBCASE("bound decreases as d_{n-1} grows") {
    ChainIIIParams lo{3, {0.3, 0.2}, {0.2}, {0.2, 0.1}};
    ChainIIIParams hi = lo;
    hi.d.back() = 0.3;
    CHECK(chain_iii_closed_form(hi).second < chain_iii_closed_form(lo).second);
  }
  SUBCASE("d_{n-1} = 0 leaves the bound undefined") {
    ChainIIIParams c{3, {0.3, 0.2}, {0.2}, {0.2, 0.0}};
    CHECK_THROWS_AS(chain_iii_closed_form(c), std::domain_error);
  }
}

TEST_CASE("chain I with distinct rates, exact") {
  // hand solve: E_1 = E_2/2 + 2 and E_2 = E_1/2 + 3/2 give (11/3, 10/3)
  BasicChainIParams<Rational> c{3,
                                {Rational(1, 4), Rational(1, 3)},
                                {Rational(1, 4), Rational(1, 3)}};
  CHECK(chain_i_closed_form(c, 1) == Rational(11, 3));
  CHECK(chain_i_closed_form(c, 2) == Rational(10, 3));
  const auto solved = solve_hitting_times(to_chain_spec(c));
  CHECK(solved[1] == Rational(11, 3));
  CHECK(solved[2] == Rational(10, 3));
}

TEST_CASE("exact rational solving reproduces the worked instance bit-exactly") {
  const Rational third(1, 3);
  const Rational quarter(1, 4);
  BasicChainIIIParams<Rational> c{3, {third, quarter}, {quarter}, {third, quarter}};
  const auto solved = solve_hitting_times(to_chain_spec(c));
  CHECK(solved[0] == Rational(75, 4));
  CHECK(solved[1] == Rational(41, 2));
  CHECK(solved[2] == Rational(14));
  CHECK(solved[3] == Rational(77, 4));
  const auto [exact_upper, bound] = chain_iii_closed_form(c);
  CHECK(exact_upper == Rational(14));
  CHECK(bound == Rational(28));
}

TEST_CASE("qc chain builder") {
  auto c = build_chain_i_qc(3);
  CHECK(c.p[0] == doctest::Approx(1.0 / 3));
  CHECK(c.p[1] == doctest::Approx(1.0 / 3));

  c = build_chain_i_qc(2);
  CHECK(c.p[0] == doctest::Approx(0.5));
  CHECK(c.q[0] == doctest::Approx(0.5));

  c = build_chain_i_qc(4);
  CHECK(c.p[1] == doctest::Approx(1.0 / 3));
  CHECK(c.p[0] == doctest::Approx(0.25));
  CHECK(c.p[2] == doctest::Approx(0.25));
}

TEST_CASE("qa one-decrement chain builders") {
  SUBCASE("one-step family at n = 4") {
    const auto c = build_chain_iii_l1(4);
    const double p = 1.0 / 12;
    CHECK(c.p[0] == doctest::Approx(2 * p));
    CHECK(c.d[0] == doctest::Approx(p));
    CHECK(c.p[1] == doctest::Approx(2 * p));
    CHECK(c.q[0] == doctest::Approx(p));
    CHECK(c.d[1] == doctest::Approx(2 * p));
    CHECK(c.p[2] == doctest::Approx(p));
    CHECK(c.q[1] == doctest::Approx(2 * p));
    CHECK(c.d[2] == doctest::Approx(3 * p));
  }
  SUBCASE("deeper-level family differs only in the d column") {
    const auto l1 = build_chain_iii_l1(4);
    const auto l2 = build_chain_iii_lgeq2(4);
    CHECK(l2.d[1] == doctest::Approx(1.0 / 12));
    CHECK(l2.d[2] == doctest::Approx(2.0 / 12));
    for (std::size_t i = 0; i < l1.p.size(); ++i) CHECK(l1.p[i] == l2.p[i]);
    for (std::size_t i = 0; i < l1.q.size(); ++i) CHECK(l1.q[i] == l2.q[i]);
  }
  SUBCASE("rows sum to 1 across the family") {
    for (int n = 4; n <= 32; n += 4) {
      CHECK_NOTHROW(validate_chain(to_chain_spec(build_chain_iii_l1(n))));
      CHECK_NOTHROW(validate_chain(to_chain_spec(build_chain_iii_lgeq2(n))));
    }
  }
  SUBCASE("one-step closed form stays under 6n(n-1)") {
    for (int n = 4; n <= 32; n += 2) {
      const auto [exact_upper, bound] = chain_iii_closed_form(build_chain_iii_l1(n));
      CHECK(exact_upper < 6.0 * n * (n - 1));
      // deeper levels keep the same order with the (1 + 1/(n-2)) allowance
      const auto [exact_deeper, bound_deeper] =
          chain_iii_closed_form(build_chain_iii_lgeq2(n));
      CHECK(bound_deeper < 6.0 * n * (n - 1) * (1.0 + 1.0 / (n - 2)));
    }
  }
}

TEST_CASE("qa maximum-state decay chain builder") {
  SUBCASE("n = 10, R = 4") {
    const auto c = build_chain_ii_qa_maxdecay(10, 4);
    CHECK(c.length == 3);
    CHECK(c.p[0] == doctest::Approx(16.0 / 90));
    CHECK(c.p[1] == doctest::Approx(8.0 / 90));
    CHECK(c.q[0] == doctest::Approx(1.0 / 90));
    CHECK(chain_ii_closed_form(c, 1) < 45.0);
  }
  SUBCASE("odd R floors the half") {
    const auto c = build_chain_ii_qa_maxdecay(10, 5);
    CHECK(c.length == 3);
    CHECK(c.p[0] == doctest::Approx(16.0 / 90));
  }
  SUBCASE("solver and closed form agree to 1e-9") {
    for (const auto& [n, r] : std::vector<std::pair<int, int>>{{6, 2}, {10, 4}, {16, 8}}) {
      const auto params = build_chain_ii_qa_maxdecay(n, r);
      const auto solved = solve_hitting_times(to_chain_spec(params));
      for (int z = 1; z <= params.length - 1; ++z) {
        const double cf = chain_ii_closed_form(params, z);
        CHECK(std::fabs(cf - solved[static_cast<std::size_t>(z - 1)]) <=
              1e-9 * std::max(1.0, std::fabs(cf)));
      }
    }
  }
  SUBCASE("empty decay phase") {
    CHECK_THROWS_AS(build_chain_ii_qa_maxdecay(10, 1), std::invalid_argument);
  }
}

TEST_CASE("first-step equations hold for solved chains") {
  const auto spec = to_chain_spec(build_chain_i_qc(6));
  const auto e = solve_hitting_times(spec);
  std::vector<char> is_target(spec.labels.size(), 0);
  for (int t : spec.target) is_target[static_cast<std::size_t>(t)] = 1;
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    if (is_target[i]) {
      CHECK(e[i] == 0.0);
      continue;
    }
    double rhs = 1.0;
    for (std::size_t j = 0; j < spec.labels.size(); ++j) {
      if (!is_target[j]) rhs += spec.rows[i][j] * e[j];
    }
    CHECK(std::fabs(rhs - e[i]) <= 1e-9 * std::max(1.0, std::fabs(e[i])));
  }
}

TEST_CASE("monte carlo simulation agrees with the solver") {
  SUBCASE("chain I") {
    const auto spec = to_chain_spec(build_chain_i_qc(5));
    const auto e = solve_hitting_times(spec);
    const int start = 2;
    const std::int64_t trials = 20000;
    std::mt19937_64 rng = derive_stream(606, 0);
    double total = 0;
    double squares = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto steps = static_cast<double>(simulate_chain(spec, start, rng));
      total += steps;
      squares += steps * steps;
    }
    const double mean = total / static_cast<double>(trials);
    const double variance = (squares - total * mean) / static_cast<double>(trials - 1);
    const double se = std::sqrt(variance / static_cast<double>(trials));
    CHECK(std::fabs(mean - e[static_cast<std::size_t>(start)]) <= 3.0 * se);
  }
  SUBCASE("chain II decay instance") {
    const auto spec = to_chain_spec(build_chain_ii_qa_maxdecay(10, 4));
    const auto e = solve_hitting_times(spec);
    const std::int64_t trials = 20000;
    std::mt19937_64 rng = derive_stream(707, 0);
    double total = 0;
    double squares = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto steps = static_cast<double>(simulate_chain(spec, 0, rng));
      total += steps;
      squares += steps * steps;
    }
    const double mean = total / static_cast<double>(trials);
    const double variance = (squares - total * mean) / static_cast<double>(trials - 1);
    const double se = std::sqrt(variance / static_cast<double>(trials));
    CHECK(std::fabs(mean - e[0]) <= 3.0 * se);
  }
}

TEST_CASE("chain matrix files") {
  SUBCASE("round trip") {
    std::istringstream in(
        "states 3 target 3\n"
        "0.5 0.5 0\n"
        "0.25 0.25 0.5\n"
        "0 0 1\n");
    const ChainSpec spec = parse_chain_file(in);
    CHECK(spec.labels == std::vector<std::string>{"1", "2", "3"});
    CHECK(spec.target == std::vector<int>{2});
    const auto e = solve_hitting_times(spec);
    CHECK(e[0] > e[1]);
  }
  SUBCASE("unknown target label") {
    std::istringstream in("states 2 target 9\n1 0\n0 1\n");
    CHECK_THROWS_AS(parse_chain_file(in), ParseError);
  }
  SUBCASE("short row") {
    std::istringstream in("states 2 target 2\n1\n0 1\n");
    CHECK_THROWS_AS(parse_chain_file(in), ParseError);
  }
  SUBCASE("row sums checked") {
    std::istringstream in("states 2 target 2\n0.7 0.7\n0 1\n");
    CHECK_THROWS_AS(parse_chain_file(in), std::invalid_argument);
  }
}
