#pragma once

#include <cstdint>
#include <optional>

namespace qgossip {

/// QC mean convergence time over all initial states in [m, M]^n: n(n-1)(M-m).
double theorem1_bound(int n, std::int64_t m, std::int64_t M);

/// QC mean convergence time from the unit-interval states X_1: n(n-1).
double lemma3_bound(int n);

/// QA mean convergence time: n^2(n-1) 3(M-m)/2 + n(n-1) R(R-1)/(n - R/2),
/// with the second term zero for R in {0, 1}. R/2 is kept exact for odd R.
double theorem2_bound(int n, std::int64_t m, std::int64_t M, std::int64_t R);

/// One Lyapunov decrement: 6n(n-1).
double prop3_bound(int n);

/// One maximum-state decrement in the remainder phase: n(n-1) R/(n - R/2),
/// defined for R >= 2 (the decay phase is empty otherwise).
double prop4_bound(int n, std::int64_t R);

/// The counting budgets that assemble the per-event times into the theorems:
/// at most M-m interval shrinkages, at most ceil((M-m)n/4) Lyapunov
/// decrements, and at most R-1 maximum-state decrements (absent when R = 0,
/// where the remainder phase does not exist).
struct DecrementBudgets {
  std::int64_t qc_shrinkages = 0;
  std::int64_t v_decrements = 0;
  std::optional<std::int64_t> max_state_decrements;
};

DecrementBudgets decrement_budgets(int n, std::int64_t m, std::int64_t M, std::int64_t R);

struct BoundReport {
  int n = 0;
  std::int64_t m = 0;
  std::int64_t M = 0;
  std::int64_t R = 0;
  double theorem1 = 0;
  double lemma3 = 0;
  double theorem2 = 0;
  double prop2_vmax = 0;
  double prop3_onestep = 0;
  std::optional<double> prop4_onedecay;
  std::int64_t eq15_decrement_count = 0;
  std::optional<std::int64_t> eq19_decay_budget;
};

BoundReport make_bound_report(int n, std::int64_t m, std::int64_t M, std::int64_t R);

}  // namespace qgossip
