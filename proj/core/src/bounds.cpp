#include "qgossip/bounds.hpp"

#include <stdexcept>

#include "qgossip/lyapunov.hpp"

namespace qgossip {

namespace {

void check_common(int n, std::int64_t m, std::int64_t M) {
  if (n < 2) throw std::invalid_argument("bounds: n must be >= 2");
  if (M < m) throw std::invalid_argument("bounds: M must be >= m");
}

}  // namespace

double theorem1_bound(int n, std::int64_t m, std::int64_t M) {
  check_common(n, m, M);
  return static_cast<double>(n) * (n - 1) * static_cast<double>(M - m);
}

double lemma3_bound(int n) {
  if (n < 2) throw std::invalid_argument("bounds: n must be >= 2");
  return static_cast<double>(n) * (n - 1);
}

double theorem2_bound(int n, std::int64_t m, std::int64_t M, std::int64_t R) {
  check_common(n, m, M);
  if (R < 0 || R > n - 1) throw std::invalid_argument("bounds: R must lie in [0, n-1]");
  // Assembled as 6n(n-1) * (M-m)n/4, i.e. the 3/2 constant, not 3.
  const double decay_phase =
      R >= 2 ? static_cast<double>(n) * (n - 1) * static_cast<double>(R) *
                   static_cast<double>(R - 1) / (static_cast<double>(n) - static_cast<double>(R) / 2.0)
             : 0.0;
  return static_cast<double>(n) * n * (n - 1) * 3.0 * static_cast<double>(M - m) / 2.0 +
         decay_phase;
}

double prop3_bound(int n) {
  if (n < 2) throw std::invalid_argument("bounds: n must be >= 2");
  return 6.0 * static_cast<double>(n) * (n - 1);
}

double prop4_bound(int n, std::int64_t R) {
  if (n < 2) throw std::invalid_argument("bounds: n must be >= 2");
  if (R < 2 || R > n - 1) {
    throw std::invalid_argument("prop4_bound: needs R in [2, n-1]; the decay phase is empty");
  }
  return static_cast<double>(n) * (n - 1) * static_cast<double>(R) /
         (static_cast<double>(n) - static_cast<double>(R) / 2.0);
}

DecrementBudgets decrement_budgets(int n, std::int64_t m, std::int64_t M, std::int64_t R) {
  check_common(n, m, M);
  if (R < 0 || R > n - 1) throw std::invalid_argument("bounds: R must lie in [0, n-1]");
  DecrementBudgets budgets;
  budgets.qc_shrinkages = M - m;
  // (M-m)n/4 may be fractional; decrement counts are integers, so ceil keeps
  // the upper-bound direction.
  budgets.v_decrements = ((M - m) * n + 3) / 4;
  if (R >= 1) budgets.max_state_decrements = R - 1;
  return budgets;
}

BoundReport make_bound_report(int n, std::int64_t m, std::int64_t M, std::int64_t R) {
  BoundReport report;
  report.n = n;
  report.m = m;
  report.M = M;
  report.R = R;
  report.theorem1 = theorem1_bound(n, m, M);
  report.lemma3 = lemma3_bound(n);
  report.theorem2 = theorem2_bound(n, m, M, R);
  report.prop2_vmax = v_upper_bound(n, m, M, R).to_double();
  report.prop3_onestep = prop3_bound(n);
  if (R >= 2) report.prop4_onedecay = prop4_bound(n, R);
  const DecrementBudgets budgets = decrement_budgets(n, m, M, R);
  report.eq15_decrement_count = budgets.v_decrements;
  report.eq19_decay_budget = budgets.max_state_decrements;
  return report;
}

}  // namespace qgossip
