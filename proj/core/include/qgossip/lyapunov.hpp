#pragma once

#include <cstdint>
#include <iosfwd>

#include "qgossip/protocol_qa.hpp"
#include "qgossip/rational.hpp"

namespace qgossip {

/// total = n * quotient + remainder with 0 <= remainder < n; the quotient is
/// the floor toward minus infinity, so negative totals behave correctly.
struct SumDecomposition {
  std::int64_t quotient = 0;   // L
  std::int64_t remainder = 0;  // R
};

SumDecomposition decompose_sum(std::int64_t total, int node_count);

/// Global surplus bookkeeping for one QA trajectory: V = D + S_plus - S_minus,
/// where D is the summed distance of the states from the floor average L.
struct LyapunovState {
  std::int64_t L = 0;
  std::int64_t R = 0;
  std::int64_t D = 0;
  std::int64_t S_plus = 0;
  std::int64_t S_minus = 0;
  std::int64_t V = 0;
};

/// Tracker start: L, R from the initial sum, D summed from scratch, no
/// surpluses yet.
LyapunovState init_tracker(const StateVector& x0);

/// Advances the tracker by one fired rule. Only surplus generation (R3(i))
/// and consumption (R2(i)) change anything; the branch is on the receiver's
/// pre-update state relative to L. Throws TrackerCorruptionError if a
/// counter would go negative — the event stream then does not match a
/// genuine QA trajectory.
LyapunovState apply_rule(const LyapunovState& tracker, const QaRuleFired& fired);

struct Lemma4Check {
  bool lower_bound = false;     // (1) V >= R
  bool at_floor = false;        // (2) V == R implies S_minus == 0 and all x_i >= L
  bool zero_error = false;      // (3) D == 0 implies S_minus == 0 and V == S_plus == R
  bool zero_remainder = false;  // (4) R == 0 implies D == 0 <=> V == 0, both surpluses 0

  bool all() const noexcept { return lower_bound && at_floor && zero_error && zero_remainder; }
};

/// Evaluates the four Lemma-4 clauses against a tracker synchronized with
/// `state`. Conditional clauses pass vacuously when their antecedent fails.
Lemma4Check check_lemma4(const LyapunovState& tracker, const QaState& state);

/// (M - m) n / 2 + R, exact.
Rational v_upper_bound(int node_count, std::int64_t m, std::int64_t M, std::int64_t R);

/// Level-set membership for the descent analysis: U_l holds the trackers with
/// V == 2l + R; level 0 is the remainder level U_R. The zero-minus subset
/// U_l^0 additionally requires S_minus == 0.
struct LevelSetQuery {
  std::int64_t level = 0;

  static LevelSetQuery remainder_level() { return LevelSetQuery{0}; }

  bool contains(const LyapunovState& t) const noexcept { return t.V == 2 * level + t.R; }
  bool contains_zero_minus(const LyapunovState& t) const noexcept {
    return contains(t) && t.S_minus == 0;
  }
};

/// Per-trajectory tracker owned by a single run. Consumes fired-rule events
/// and optionally writes a per-step CSV trace (k, rule, D, S_plus, S_minus, V).
class LyapunovTracker {
 public:
  explicit LyapunovTracker(const StateVector& x0) : state_(init_tracker(x0)) {}

  void on_rule(const QaRuleFired& fired);

  const LyapunovState& state() const noexcept { return state_; }
  std::int64_t steps() const noexcept { return steps_; }

  /// Writes the CSV header immediately; each subsequent event appends a row.
  void set_trace(std::ostream* sink);

 private:
  LyapunovState state_;
  std::int64_t steps_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace qgossip
