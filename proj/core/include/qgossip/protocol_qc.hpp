#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qgossip/graph.hpp"

namespace qgossip {

using StateVector = std::vector<std::int64_t>;

/// Receiver update choice for the interval cases of the QC rules: on R2 the
/// new value must lie in (x_i, x_j], on R3 in [x_j, x_i). ADOPT takes x_j,
/// STEP moves one unit toward it; a custom selector is validated per step.
class QcPolicy {
 public:
  using Selector = std::function<std::int64_t(std::int64_t receiver, std::int64_t incoming)>;

  static QcPolicy adopt();
  static QcPolicy step();
  static QcPolicy custom(std::string name, Selector selector);

  /// Only called when receiver != incoming.
  std::int64_t choose(std::int64_t receiver, std::int64_t incoming) const {
    return selector_(receiver, incoming);
  }

  const std::string& name() const noexcept { return name_; }

 private:
  QcPolicy(std::string name, Selector selector);

  std::string name_;
  Selector selector_;
};

bool is_consensus(const StateVector& x) noexcept;

struct IntervalStats {
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::int64_t length = 0;
};

IntervalStats interval_stats(const StateVector& x);

/// One QC update along `edge`: the sender never changes, the receiver is
/// updated per R1/R2/R3 with the policy's in-interval choice. Throws
/// PolicyViolationError if the policy leaves the mandated interval.
void qc_step_inplace(StateVector& x, Edge edge, const QcPolicy& policy);
StateVector qc_step(const StateVector& x, Edge edge, const QcPolicy& policy);

/// Member of X_1: `ones_count` leading ones followed by zeros.
StateVector x1_state(int node_count, int ones_count);

struct QcRunResult {
  StateVector state;
  std::int64_t steps = 0;
};

std::int64_t default_qc_max_steps(int node_count, const StateVector& x0);

/// Runs QC until consensus and returns the first hitting step. A digraph
/// without a globally reachable node is run anyway (convergence is then not
/// guaranteed); when a `warnings` sink is supplied the condition is reported
/// there. Throws NonConvergenceError past max_steps (0 selects the default
/// budget).
QcRunResult run_qc(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   const QcPolicy& policy, std::mt19937_64& rng, std::int64_t max_steps = 0,
                   std::vector<std::string>* warnings = nullptr);

QcRunResult run_qc(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   const QcPolicy& policy, std::uint64_t seed, std::int64_t max_steps = 0,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace qgossip
