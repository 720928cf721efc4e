#include "qgossip/protocol_qa.hpp"

#include <numeric>
#include <utility>

#include "qgossip/errors.hpp"
#include "qgossip/lyapunov.hpp"
#include "qgossip/rng.hpp"

namespace qgossip {

std::string_view qa_rule_name(QaRule rule) noexcept {
  switch (rule) {
    case QaRule::R1i:
      return "R1i";
    case QaRule::R1ii:
      return "R1ii";
    case QaRule::R2i:
      return "R2i";
    case QaRule::R2ii:
      return "R2ii";
    case QaRule::R3i:
      return "R3i";
    case QaRule::R3ii:
      return "R3ii";
  }
  return "?";
}

QaRuleFired qa_step_inplace(QaState& state, Edge edge) {
  const auto n = static_cast<int>(state.x.size());
  if (state.s.size() != state.x.size()) {
    throw std::invalid_argument("qa_step: state and surplus vectors differ in size");
  }
  if (edge.from < 1 || edge.from > n || edge.to < 1 || edge.to > n || edge.from == edge.to) {
    throw std::invalid_argument("qa_step: edge endpoints out of range");
  }
  const auto j = static_cast<std::size_t>(edge.from - 1);
  const auto i = static_cast<std::size_t>(edge.to - 1);
  auto& x = state.x;
  auto& s = state.s;

  QaRuleFired fired{QaRule::R1i, edge.to, x[i]};
  if (x[i] == x[j]) {
    if (s[i] > 0 && s[j] > 0) {
      fired.rule = QaRule::R1i;  // surplus sent back; nothing changes
    } else {
      s[i] += s[j];
      s[j] = 0;
      fired.rule = QaRule::R1ii;
    }
  } else if (x[i] < x[j]) {
    if (s[i] + s[j] > 0) {
      x[i] += 1;
      s[i] = s[i] + s[j] - 1;
      s[j] = 0;
      fired.rule = QaRule::R2i;
    } else {
      fired.rule = QaRule::R2ii;
    }
  } else {
    if (s[i] + s[j] == 0) {
      x[i] -= 1;
      s[i] = 1;
      fired.rule = QaRule::R3i;
    } else {
      fired.rule = QaRule::R3ii;  // surplus sent back; nothing changes
    }
  }
  return fired;
}

std::pair<QaState, QaRuleFired> qa_step(const QaState& state, Edge edge) {
  QaState next = state;
  QaRuleFired fired = qa_step_inplace(next, edge);
  return {std::move(next), fired};
}

bool is_average_consensus(const StateVector& x, std::int64_t initial_sum, int node_count) {
  const SumDecomposition lr = decompose_sum(initial_sum, node_count);
  const std::int64_t floor_value = lr.quotient;
  const std::int64_t ceil_value = floor_value + (lr.remainder > 0 ? 1 : 0);
  for (std::int64_t v : x) {
    if (v != floor_value && v != ceil_value) return false;
  }
  return true;
}

std::int64_t default_qa_max_steps(int node_count, const StateVector& x0) {
  const IntervalStats stats = interval_stats(x0);
  const auto n = static_cast<__int128>(node_count);
  const __int128 budget = static_cast<__int128>(10000) * n * n * n * (stats.length + 1);
  constexpr std::int64_t cap = INT64_MAX / 2;
  return budget > cap ? cap : static_cast<std::int64_t>(budget);
}

QaRunResult run_qa(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   std::mt19937_64& rng, std::int64_t max_steps, LyapunovTracker* tracker) {
  if (x0.size() != static_cast<std::size_t>(g.node_count())) {
    throw std::invalid_argument("run_qa: initial state size does not match node count");
  }
  if (!is_complete(g)) {
    throw UnsupportedTopologyError(
        "run_qa: QA requires a complete digraph (the surplus send-back uses the reverse edge)");
  }
  if (max_steps <= 0) max_steps = default_qa_max_steps(g.node_count(), x0);

  const int n = g.node_count();
  const std::int64_t initial_sum = std::accumulate(x0.begin(), x0.end(), std::int64_t{0});
  const SumDecomposition lr = decompose_sum(initial_sum, n);
  const std::int64_t floor_value = lr.quotient;
  const std::int64_t ceil_value = floor_value + (lr.remainder > 0 ? 1 : 0);

  QaState state{x0, StateVector(x0.size(), 0)};
  std::int64_t outside = 0;
  for (std::int64_t v : state.x) {
    if (v != floor_value && v != ceil_value) ++outside;
  }

  std::int64_t steps = 0;
  while (outside > 0) {
    if (steps >= max_steps) {
      throw NonConvergenceError("run_qa: step budget exhausted before average consensus", steps);
    }
    const Edge edge = model.sample(rng);
    const std::int64_t before = state.x[static_cast<std::size_t>(edge.to - 1)];
    const QaRuleFired fired = qa_step_inplace(state, edge);
    const std::int64_t after = state.x[static_cast<std::size_t>(edge.to - 1)];
    if (after != before) {
      const bool was_inside = before == floor_value || before == ceil_value;
      const bool now_inside = after == floor_value || after == ceil_value;
      outside += (was_inside ? 1 : 0) - (now_inside ? 1 : 0);
    }
    if (tracker != nullptr) tracker->on_rule(fired);
    ++steps;
  }
  return QaRunResult{std::move(state), steps};
}

QaRunResult run_qa(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   std::uint64_t seed, std::int64_t max_steps, LyapunovTracker* tracker) {
  std::mt19937_64 rng = derive_stream(seed, 0);
  return run_qa(g, model, x0, rng, max_steps, tracker);
}

}  // namespace qgossip
