#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "qgossip/graph.hpp"
#include "qgossip/protocol_qc.hpp"

namespace qgossip {

/// Node states plus binary surplus variables. (x + s)^T 1 is conserved by
/// every update and each s_i stays in {0, 1}.
struct QaState {
  StateVector x;
  StateVector s;
};

enum class QaRule { R1i, R1ii, R2i, R2ii, R3i, R3ii };

std::string_view qa_rule_name(QaRule rule) noexcept;

/// Which rule fired, at which receiver, and the receiver's state before the
/// update. The Lyapunov tracker branches on that pre-update value.
struct QaRuleFired {
  QaRule rule = QaRule::R1i;
  int receiver = 0;  // node label
  std::int64_t receiver_x_before = 0;
};

/// One QA update along `edge`. Exactly one rule fires; only the receiver's
/// (x, s) and the sender's s can change. R1(i) and R3(ii) — the surplus
/// send-back cases — restore the pre-step configuration exactly.
/// Precondition: the edge belongs to a complete digraph (the send-back needs
/// the reverse edge).
QaRuleFired qa_step_inplace(QaState& state, Edge edge);
std::pair<QaState, QaRuleFired> qa_step(const QaState& state, Edge edge);

/// True iff every x_i is the floor or ceiling of initial_sum / n, with floor
/// taken toward minus infinity.
bool is_average_consensus(const StateVector& x, std::int64_t initial_sum, int node_count);

struct QaRunResult {
  QaState state;
  std::int64_t steps = 0;
};

std::int64_t default_qa_max_steps(int node_count, const StateVector& x0);

class LyapunovTracker;

/// Runs QA from (x0, 0) until every state is the floor or ceiling of the
/// initial average; returns the first hitting step. Residual surpluses at
/// absorption are left in the returned state for diagnostics. Throws
/// UnsupportedTopologyError unless the digraph is complete, and
/// NonConvergenceError past max_steps (0 selects the default budget).
QaRunResult run_qa(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   std::mt19937_64& rng, std::int64_t max_steps = 0,
                   LyapunovTracker* tracker = nullptr);

QaRunResult run_qa(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                   std::uint64_t seed, std::int64_t max_steps = 0,
                   LyapunovTracker* tracker = nullptr);

}  // namespace qgossip
