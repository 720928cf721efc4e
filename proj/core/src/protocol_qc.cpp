#include "qgossip/protocol_qc.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "qgossip/errors.hpp"
#include "qgossip/rng.hpp"

namespace qgossip {

QcPolicy::QcPolicy(std::string name, Selector selector)
    : name_(std::move(name)), selector_(std::move(selector)) {}

QcPolicy QcPolicy::adopt() {
  return QcPolicy("adopt", [](std::int64_t, std::int64_t incoming) { return incoming; });
}

QcPolicy QcPolicy::step() {
  return QcPolicy("step", [](std::int64_t receiver, std::int64_t incoming) {
    return receiver + (incoming > receiver ? 1 : -1);
  });
}

QcPolicy QcPolicy::custom(std::string name, Selector selector) {
  if (!selector) throw std::invalid_argument("QcPolicy: empty selector");
  return QcPolicy(std::move(name), std::move(selector));
}

bool is_consensus(const StateVector& x) noexcept {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] != x[0]) return false;
  }
  return true;
}

IntervalStats interval_stats(const StateVector& x) {
  if (x.empty()) throw std::invalid_argument("interval_stats: empty state");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return IntervalStats{*lo, *hi, *hi - *lo};
}

void qc_step_inplace(StateVector& x, Edge edge, const QcPolicy& policy) {
  const auto n = static_cast<int>(x.size());
  if (edge.from < 1 || edge.from > n || edge.to < 1 || edge.to > n || edge.from == edge.to) {
    throw std::invalid_argument("qc_step: edge endpoints out of range");
  }
  const std::int64_t sender = x[static_cast<std::size_t>(edge.from - 1)];
  std::int64_t& receiver = x[static_cast<std::size_t>(edge.to - 1)];
  if (receiver == sender) return;  // R1
  const std::int64_t chosen = policy.choose(receiver, sender);
  if (receiver < sender) {
    // R2: new value in (x_i, x_j]
    if (chosen <= receiver || chosen > sender) {
      throw PolicyViolationError("qc policy '" + policy.name() + "' left the R2 interval");
    }
  } else {
    // R3: new value in [x_j, x_i)
    if (chosen < sender || chosen >= receiver) {
      throw PolicyViolationError("qc policy '" + policy.name() + "' left the R3 interval");
    }
  }
  receiver = chosen;
}

StateVector qc_step(const StateVector& x, Edge edge, const QcPolicy& policy) {
  StateVector next = x;
  qc_step_inplace(next, edge, policy);
  return next;
}

StateVector x1_state(int node_count, int ones_count) {
  if (node_count < 2) throw std::invalid_argument("x1_state: node count must be >= 2");
  if (ones_count < 1 || ones_count > node_count - 1) {
    throw std::invalid_argument("x1_state: ones count must lie in [1, n-1]");
  }
  StateVector x(static_cast<std::size_t>(node_count), 0);
  std::fill_n(x.begin(), ones_count, 1);
  return x;
}

std::int64_t default_qc_max_steps(int node_count, const StateVector& x0) {
  const IntervalStats stats = interval_stats(x0);
  const auto n = static_cast<__int128>(node_count);
  const __int128 budget = static_cast<__int128>(10000) * n * n * (stats.length + 1);
  constexpr std::int64_t cap = INT64_MAX / 2;
  return budget > cap ? cap : static_cast<std::int64_t>(budget);
}

QcRunResult run_qc(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   const QcPolicy& policy, std::mt19937_64& rng, std::int64_t max_steps,
                   std::vector<std::string>* warnings) {
  if (x0.size() != static_cast<std::size_t>(g.node_count())) {
    throw std::invalid_argument("run_qc: initial state size does not match node count");
  }
  if (warnings != nullptr && !has_globally_reachable_node(g)) {
    warnings->push_back(
        "digraph has no globally reachable node; QC consensus is not guaranteed");
  }
  if (max_steps <= 0) max_steps = default_qc_max_steps(g.node_count(), x0);

  StateVector x = x0;
  std::unordered_map<std::int64_t, std::int64_t> value_count;
  for (std::int64_t v : x) ++value_count[v];

  std::int64_t steps = 0;
  while (value_count.size() > 1) {
    if (steps >= max_steps) {
      throw NonConvergenceError("run_qc: step budget exhausted before consensus", steps);
    }
    const Edge edge = model.sample(rng);
    const std::int64_t before = x[static_cast<std::size_t>(edge.to - 1)];
    qc_step_inplace(x, edge, policy);
    const std::int64_t after = x[static_cast<std::size_t>(edge.to - 1)];
    if (after != before) {
      if (--value_count[before] == 0) value_count.erase(before);
      ++value_count[after];
    }
    ++steps;
  }
  return QcRunResult{std::move(x), steps};
}

QcRunResult run_qc(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   const QcPolicy& policy, std::uint64_t seed, std::int64_t max_steps,
                   std::vector<std::string>* warnings) {
  std::mt19937_64 rng = derive_stream(seed, 0);
  return run_qc(g, model, x0, policy, rng, max_steps, warnings);
}

}  // namespace qgossip
