#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qgossip/graph.hpp"
#include "qgossip/lyapunov.hpp"
#include "qgossip/protocol_qa.hpp"
#include "qgossip/protocol_qc.hpp"

namespace qgossip {

enum class Algorithm { Qc, Qa };

std::string_view algorithm_name(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::Qc;
  std::string graph_spec;
  std::string init_spec;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::int64_t max_steps = 0;  // 0 selects the per-algorithm default
  QcPolicy policy = QcPolicy::adopt();
  bool tracker = false;  // attach a Lyapunov tracker per trial (QA only)
  int workers = 0;       // 0 = auto; results are identical for any value
};

/// Exact, order-independent aggregation: integer sums merge without rounding,
/// so split ensembles recombine to bit-identical statistics.
struct TrialAccumulator {
  std::int64_t count = 0;
  std::int64_t failures = 0;
  __int128 sum = 0;
  __int128 sum_squares = 0;
  std::int64_t min = 0;
  std::int64_t max = 0;

  void add(std::int64_t value);
  void add_failure() { ++failures; }
  void merge(const TrialAccumulator& other);
};

struct TrialStats {
  std::int64_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // sqrt(variance / trials)
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::int64_t failures = 0;
};

TrialStats finalize(const TrialAccumulator& acc);

/// floor(n/2) ones then zeros — the slowest QC start.
StateVector qc_worst_init(int n);

/// [2, 1, ..., 1, 0] — sum n, so L = 1 and R = 0; the slowest QA start.
StateVector qa_worst_init(int n);

/// Accepts "x1:<n>:<z>", "halfsplit:<n>", "qaworst:<n>",
/// "uniform:<n>:<m>:<M>:<seed>" (inclusive integer endpoints), or an explicit
/// comma/whitespace-separated integer vector.
StateVector parse_init_spec(const std::string& spec);

/// Runs `trials` independent trajectories with per-trial streams derived from
/// (seed, trial index). Non-converged trials are counted as failures, not
/// fatal. Identical config and seed give bit-identical stats for any worker
/// count.
TrialStats run_ensemble(const ExperimentConfig& config);

/// Trials [first, last) of the same ensemble; merging ranges reproduces the
/// full run exactly.
TrialAccumulator run_ensemble_range(const ExperimentConfig& config, std::int64_t first,
                                    std::int64_t last);

struct SweepRow {
  int n = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  TrialStats stats;
  double bound = 0.0;  // Theorem 1 for QC, Theorem 2 for QA
};

/// Worst-case-initialized ensemble per n, with the matching bound column.
std::vector<SweepRow> sweep(Algorithm algorithm, const std::vector<int>& n_values,
                            std::int64_t trials, std::uint64_t seed);

/// Least-squares slope of log(mean) against log(n).
double log_log_slope(const std::vector<SweepRow>& rows);

struct LevelMembership {
  std::int64_t level = 0;    // (V - R) / 2; 0 is the remainder level
  bool in_zero_subset = false;  // S_minus == 0
};

/// Throws TrackerCorruptionError when V - R is odd or negative (descents
/// move in steps of exactly 2).
LevelMembership level_set_membership(const LyapunovState& tracker);

/// Per-step audit of one QA trajectory: conservation, binary surpluses, hull
/// monotonicity, tracker consistency, Lyapunov descent shape, the Lemma 4
/// clauses, and the V upper bound. The step function is injectable so tests
/// can feed a deliberately broken update through the same checks.
struct QaAudit {
  std::int64_t steps = 0;
  bool converged = false;
  std::int64_t conservation_violations = 0;
  std::int64_t surplus_range_violations = 0;
  std::int64_t hull_violations = 0;
  std::int64_t d_mismatch_violations = 0;       // incremental D vs recomputed
  std::int64_t surplus_sum_violations = 0;      // S_plus + S_minus vs s^T 1
  std::int64_t v_increase_violations = 0;
  std::int64_t bad_decrement_violations = 0;    // drop != 2 or wrong event shape
  std::int64_t lemma4_violations = 0;
  std::int64_t prop2_violations = 0;
  std::int64_t tracker_corruptions = 0;

  std::int64_t total_violations() const noexcept {
    return conservation_violations + surplus_range_violations + hull_violations +
           d_mismatch_violations + surplus_sum_violations + v_increase_violations +
           bad_decrement_violations + lemma4_violations + prop2_violations + tracker_corruptions;
  }
};

using QaStepFn = std::function<QaRuleFired(QaState&, Edge)>;

QaAudit audit_qa_trajectory(const Digraph& g, const ActivationModel& model,
                            const StateVector& x0, std::uint64_t seed, std::int64_t max_steps = 0,
                            const QaStepFn& step = {});

enum class VerifyDepth { Small, Full };

VerifyDepth parse_verify_depth(const std::string& name);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const noexcept {
    for (const CheckResult& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// Executes the oracle-equivalence, invariant, and dominance checks. Small
/// depth restricts to n <= 8 and 2,000 trials; full depth runs the complete
/// battery.
VerifyReport verify_suite(VerifyDepth depth, std::uint64_t seed);

}  // namespace qgossip
