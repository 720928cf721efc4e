#include "qgossip/lyapunov.hpp"

#include <numeric>
#include <ostream>

#include "qgossip/errors.hpp"

namespace qgossip {

SumDecomposition decompose_sum(std::int64_t total, int node_count) {
  if (node_count < 1) throw std::invalid_argument("decompose_sum: node count must be >= 1");
  const auto n = static_cast<std::int64_t>(node_count);
  std::int64_t quotient = total / n;
  std::int64_t remainder = total % n;
  if (remainder < 0) {
    remainder += n;
    quotient -= 1;
  }
  return SumDecomposition{quotient, remainder};
}

LyapunovState init_tracker(const StateVector& x0) {
  if (x0.empty()) throw std::invalid_argument("init_tracker: empty initial state");
  const std::int64_t total = std::accumulate(x0.begin(), x0.end(), std::int64_t{0});
  const SumDecomposition lr = decompose_sum(total, static_cast<int>(x0.size()));
  LyapunovState t;
  t.L = lr.quotient;
  t.R = lr.remainder;
  for (std::int64_t v : x0) t.D += v >= t.L ? v - t.L : t.L - v;
  t.V = t.D;
  return t;
}

LyapunovState apply_rule(const LyapunovState& tracker, const QaRuleFired& fired) {
  LyapunovState t = tracker;
  switch (fired.rule) {
    case QaRule::R3i:
      // S1: one surplus generated; the receiver moved down by one.
      if (fired.receiver_x_before > t.L) {
        t.D -= 1;
        t.S_plus += 1;
      } else {
        t.D += 1;
        t.S_minus += 1;
      }
      break;
    case QaRule::R2i:
      // S2: one surplus consumed; the receiver moved up by one.
      if (fired.receiver_x_before >= t.L) {
        t.D += 1;
        if (t.S_plus == 0) {
          throw TrackerCorruptionError("apply_rule: S_plus decrement below zero");
        }
        t.S_plus -= 1;
      } else {
        t.D -= 1;
        if (t.S_minus > 0) {
          t.S_minus -= 1;
        } else {
          if (t.S_plus == 0) {
            throw TrackerCorruptionError("apply_rule: S_plus decrement below zero");
          }
          t.S_plus -= 1;
        }
      }
      break;
    default:
      // S3: no state update, no tracker change.
      break;
  }
  t.V = t.D + t.S_plus - t.S_minus;
  return t;
}

Lemma4Check check_lemma4(const LyapunovState& t, const QaState& state) {
  Lemma4Check result;
  result.lower_bound = t.V >= t.R;

  result.at_floor = true;
  if (t.V == t.R) {
    result.at_floor = t.S_minus == 0;
    for (std::int64_t v : state.x) {
      if (v < t.L) result.at_floor = false;
    }
  }

  result.zero_error = true;
  if (t.D == 0) {
    result.zero_error = t.S_minus == 0 && t.V == t.R && t.S_plus == t.R;
  }

  result.zero_remainder = true;
  if (t.R == 0) {
    result.zero_remainder = (t.D == 0) == (t.V == 0);
    if (t.D == 0 && (t.S_plus != 0 || t.S_minus != 0)) result.zero_remainder = false;
  }
  return result;
}

Rational v_upper_bound(int node_count, std::int64_t m, std::int64_t M, std::int64_t R) {
  if (M < m) throw std::invalid_argument("v_upper_bound: M must be >= m");
  if (R < 0 || R >= node_count) throw std::invalid_argument("v_upper_bound: R must lie in [0, n)");
  return Rational(M - m) * Rational(node_count) / Rational(2) + Rational(R);
}

void LyapunovTracker::on_rule(const QaRuleFired& fired) {
  state_ = apply_rule(state_, fired);
  ++steps_;
  if (trace_ != nullptr) {
    *trace_ << steps_ << ',' << qa_rule_name(fired.rule) << ',' << state_.D << ','
            << state_.S_plus << ',' << state_.S_minus << ',' << state_.V << '\n';
  }
}

void LyapunovTracker::set_trace(std::ostream* sink) {
  trace_ = sink;
  if (trace_ != nullptr) *trace_ << "k,rule,D,S_plus,S_minus,V\n";
}

}  // namespace qgossip
