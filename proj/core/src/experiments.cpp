#include "qgossip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "qgossip/bounds.hpp"
#include "qgossip/errors.hpp"
#include "qgossip/rng.hpp"

namespace qgossip {

std::string_view algorithm_name(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::Qc ? "qc" : "qa";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "qc") return Algorithm::Qc;
  if (name == "qa") return Algorithm::Qa;
  throw ParseError("unknown algorithm '" + name + "' (expected qc or qa)");
}

void TrialAccumulator::add(std::int64_t value) {
  if (count == 0) {
    min = value;
    max = value;
  } else {
    min = std::min(min, value);
    max = std::max(max, value);
  }
  ++count;
  sum += value;
  sum_squares += static_cast<__int128>(value) * value;
}

void TrialAccumulator::merge(const TrialAccumulator& other) {
  if (other.count > 0) {
    if (count == 0) {
      min = other.min;
      max = other.max;
    } else {
      min = std::min(min, other.min);
      max = std::max(max, other.max);
    }
  }
  count += other.count;
  failures += other.failures;
  sum += other.sum;
  sum_squares += other.sum_squares;
}

TrialStats finalize(const TrialAccumulator& acc) {
  TrialStats stats;
  stats.trials = acc.count;
  stats.failures = acc.failures;
  stats.min = acc.min;
  stats.max = acc.max;
  if (acc.count > 0) {
    stats.mean = static_cast<double>(static_cast<long double>(acc.sum) / acc.count);
    if (acc.count > 1) {
      const __int128 numerator = acc.sum_squares * acc.count - acc.sum * acc.sum;
      const long double denom =
          static_cast<long double>(acc.count) * static_cast<long double>(acc.count - 1);
      stats.variance = static_cast<double>(static_cast<long double>(numerator) / denom);
      stats.se = std::sqrt(stats.variance / static_cast<double>(acc.count));
    }
  }
  return stats;
}

StateVector qc_worst_init(int n) {
  if (n < 2) throw std::invalid_argument("qc_worst_init: n must be >= 2");
  StateVector x(static_cast<std::size_t>(n), 0);
  std::fill_n(x.begin(), n / 2, 1);
  return x;
}

StateVector qa_worst_init(int n) {
  if (n < 2) throw std::invalid_argument("qa_worst_init: n must be >= 2");
  StateVector x(static_cast<std::size_t>(n), 1);
  x.front() = 2;
  x.back() = 0;
  return x;
}

namespace {

std::vector<std::int64_t> split_spec_numbers(const std::string& body, const std::string& spec) {
  std::vector<std::int64_t> numbers;
  std::istringstream stream(body);
  std::string token;
  while (std::getline(stream, token, ':')) {
    try {
      std::size_t pos = 0;
      numbers.push_back(std::stoll(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("init spec: cannot parse '" + spec + "'");
    }
  }
  return numbers;
}

}  // namespace

StateVector parse_init_spec(const std::string& spec) {
  const auto with_prefix = [&](const char* prefix) {
    return spec.rfind(prefix, 0) == 0;
  };
  if (with_prefix("x1:")) {
    const auto nums = split_spec_numbers(spec.substr(3), spec);
    if (nums.size() != 2) throw ParseError("init spec: x1:<n>:<z> takes two numbers");
    return x1_state(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
  }
  if (with_prefix("halfsplit:")) {
    const auto nums = split_spec_numbers(spec.substr(10), spec);
    if (nums.size() != 1) throw ParseError("init spec: halfsplit:<n> takes one number");
    return qc_worst_init(static_cast<int>(nums[0]));
  }
  if (with_prefix("qaworst:")) {
    const auto nums = split_spec_numbers(spec.substr(8), spec);
    if (nums.size() != 1) throw ParseError("init spec: qaworst:<n> takes one number");
    return qa_worst_init(static_cast<int>(nums[0]));
  }
  if (with_prefix("uniform:")) {
    const auto nums = split_spec_numbers(spec.substr(8), spec);
    if (nums.size() != 4) {
      throw ParseError("init spec: uniform:<n>:<m>:<M>:<seed> takes four numbers");
    }
    const auto n = static_cast<int>(nums[0]);
    const std::int64_t lo = nums[1];
    const std::int64_t hi = nums[2];
    if (n < 1 || hi < lo) throw ParseError("init spec: uniform range is empty");
    std::mt19937_64 rng = derive_stream(static_cast<std::uint64_t>(nums[3]), 0);
    StateVector x(static_cast<std::size_t>(n));
    for (auto& v : x) v = uniform_int(rng, lo, hi);
    return x;
  }
  // explicit vector, comma or whitespace separated
  std::string body = spec;
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream stream(body);
  StateVector x;
  std::int64_t v = 0;
  while (stream >> v) x.push_back(v);
  if (!stream.eof()) throw ParseError("init spec: cannot parse '" + spec + "'");
  if (x.empty()) throw ParseError("init spec: empty state");
  return x;
}

namespace {

struct ResolvedExperiment {
  Digraph graph;
  ActivationModel model;
  StateVector x0;
};

ResolvedExperiment resolve(const ExperimentConfig& config) {
  GraphInput input = parse_graph_spec(config.graph_spec);
  StateVector x0 = parse_init_spec(config.init_spec);
  if (x0.size() != static_cast<std::size_t>(input.graph.node_count())) {
    throw ParseError("experiment: initial state size does not match the graph's node count");
  }
  if (config.algorithm == Algorithm::Qa && !is_complete(input.graph)) {
    throw UnsupportedTopologyError(
        "experiment: QA requires a complete digraph (the surplus send-back uses the reverse "
        "edge)");
  }
  ActivationModel model = input.resolve_model();
  return ResolvedExperiment{std::move(input.graph), std::move(model), std::move(x0)};
}

TrialAccumulator run_trials(const ResolvedExperiment& experiment, const ExperimentConfig& config,
                            std::int64_t first, std::int64_t last) {
  TrialAccumulator acc;
  for (std::int64_t trial = first; trial < last; ++trial) {
    std::mt19937_64 rng = derive_stream(config.seed, static_cast<std::uint64_t>(trial));
    try {
      if (config.algorithm == Algorithm::Qc) {
        const QcRunResult result = run_qc(experiment.graph, experiment.model, experiment.x0,
                                          config.policy, rng, config.max_steps);
        acc.add(result.steps);
      } else if (config.tracker) {
        LyapunovTracker tracker(experiment.x0);
        const QaRunResult result = run_qa(experiment.graph, experiment.model, experiment.x0, rng,
                                          config.max_steps, &tracker);
        acc.add(result.steps);
      } else {
        const QaRunResult result =
            run_qa(experiment.graph, experiment.model, experiment.x0, rng, config.max_steps);
        acc.add(result.steps);
      }
    } catch (const NonConvergenceError&) {
      acc.add_failure();
    }
  }
  return acc;
}

}  // namespace

TrialAccumulator run_ensemble_range(const ExperimentConfig& config, std::int64_t first,
                                    std::int64_t last) {
  if (first < 0 || last < first) throw std::invalid_argument("run_ensemble_range: bad range");
  const ResolvedExperiment experiment = resolve(config);
  return run_trials(experiment, config, first, last);
}

TrialStats run_ensemble(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("run_ensemble: trials must be >= 1");
  const ResolvedExperiment experiment = resolve(config);

  int workers = config.workers;
  if (workers <= 0) {
    // auto: spread only when the ensemble is large enough to be worth it
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(
        std::min<std::int64_t>(workers, std::max<std::int64_t>(1, config.trials / 512)));
  }
  workers = static_cast<int>(std::min<std::int64_t>(workers, config.trials));

  TrialAccumulator total;
  if (workers <= 1) {
    total = run_trials(experiment, config, 0, config.trials);
  } else {
    // Disjoint trial ranges; per-trial streams are keyed by absolute trial
    // index and the merge is exact, so the result does not depend on the
    // split.
    std::vector<TrialAccumulator> partial(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (config.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t first = w * chunk;
      const std::int64_t last = std::min<std::int64_t>(config.trials, first + chunk);
      threads.emplace_back([&, w, first, last] {
        try {
          partial[static_cast<std::size_t>(w)] = run_trials(experiment, config, first, last);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const std::exception_ptr& error : errors) {
      if (error) std::rethrow_exception(error);
    }
    for (const TrialAccumulator& acc : partial) total.merge(acc);
  }
  return finalize(total);
}

std::vector<SweepRow> sweep(Algorithm algorithm, const std::vector<int>& n_values,
                            std::int64_t trials, std::uint64_t seed) {
  if (!std::is_sorted(n_values.begin(), n_values.end())) {
    throw std::invalid_argument("sweep: n values must be sorted ascending");
  }
  std::vector<SweepRow> rows;
  rows.reserve(n_values.size());
  for (int n : n_values) {
    ExperimentConfig config;
    config.algorithm = algorithm;
    config.graph_spec = "complete:" + std::to_string(n);
    config.trials = trials;
    // Decorrelate the per-n ensembles while keeping everything derived from
    // the single master seed.
    config.seed = mix64(seed ^ mix64(static_cast<std::uint64_t>(n)));
    SweepRow row;
    row.n = n;
    row.trials = trials;
    row.seed = seed;
    if (algorithm == Algorithm::Qc) {
      config.init_spec = "halfsplit:" + std::to_string(n);
      row.bound = theorem1_bound(n, 0, 1);
    } else {
      config.init_spec = "qaworst:" + std::to_string(n);
      row.bound = theorem2_bound(n, 0, 2, 0);
    }
    row.stats = run_ensemble(config);
    rows.push_back(row);
  }
  return rows;
}

double log_log_slope(const std::vector<SweepRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("log_log_slope: need at least two points");
  double sx = 0;
  double sy = 0;
  double sxx = 0;
  double sxy = 0;
  for (const SweepRow& row : rows) {
    if (row.stats.mean <= 0) throw std::invalid_argument("log_log_slope: nonpositive mean");
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.stats.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto k = static_cast<double>(rows.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

LevelMembership level_set_membership(const LyapunovState& tracker) {
  const std::int64_t gap = tracker.V - tracker.R;
  if (gap < 0 || gap % 2 != 0) {
    throw TrackerCorruptionError(
        "level_set_membership: V - R must be a nonnegative even number (decrements are exactly "
        "2)");
  }
  return LevelMembership{gap / 2, tracker.S_minus == 0};
}

VerifyDepth parse_verify_depth(const std::string& name) {
  if (name == "small") return VerifyDepth::Small;
  if (name == "full") return VerifyDepth::Full;
  throw ParseError("unknown verify depth '" + name + "' (expected small or full)");
}

QaAudit audit_qa_trajectory(const Digraph& g, const ActivationModel& model, const StateVector& x0,
                            std::uint64_t seed, std::int64_t max_steps, const QaStepFn& step) {
  const int n = g.node_count();
  if (x0.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("audit_qa_trajectory: state size does not match node count");
  }
  const QaStepFn step_fn =
      step ? step : [](QaState& s, Edge e) { return qa_step_inplace(s, e); };
  if (max_steps <= 0) max_steps = default_qa_max_steps(n, x0);

  const std::int64_t initial_sum = std::accumulate(x0.begin(), x0.end(), std::int64_t{0});
  const IntervalStats hull0 = interval_stats(x0);
  LyapunovState tracker = init_tracker(x0);
  const Rational v_max = v_upper_bound(n, hull0.min, hull0.max, tracker.R);

  QaState state{x0, StateVector(x0.size(), 0)};
  QaAudit audit;
  std::int64_t prev_min = hull0.min;
  std::int64_t prev_max = hull0.max;

  std::mt19937_64 rng = derive_stream(seed, 0);
  while (audit.steps < max_steps) {
    if (is_average_consensus(state.x, initial_sum, n)) {
      audit.converged = true;
      break;
    }
    const Edge edge = model.sample(rng);
    const std::int64_t v_before = tracker.V;
    const std::int64_t s_minus_before = tracker.S_minus;
    const QaRuleFired fired = step_fn(state, edge);
    ++audit.steps;

    try {
      tracker = apply_rule(tracker, fired);
    } catch (const TrackerCorruptionError&) {
      ++audit.tracker_corruptions;
      break;  // the tracker is unusable past this point
    }

    // conservation of (x + s)^T 1, exactly, in integers
    const std::int64_t sum_x = std::accumulate(state.x.begin(), state.x.end(), std::int64_t{0});
    const std::int64_t sum_s = std::accumulate(state.s.begin(), state.s.end(), std::int64_t{0});
    if (sum_x + sum_s != initial_sum) ++audit.conservation_violations;

    for (std::int64_t s_value : state.s) {
      if (s_value != 0 && s_value != 1) {
        ++audit.surplus_range_violations;
        break;
      }
    }

    const IntervalStats hull = interval_stats(state.x);
    if (hull.min < prev_min || hull.max > prev_max) ++audit.hull_violations;
    prev_min = hull.min;
    prev_max = hull.max;

    std::int64_t recomputed_d = 0;
    for (std::int64_t v : state.x) {
      recomputed_d += v >= tracker.L ? v - tracker.L : tracker.L - v;
    }
    if (recomputed_d != tracker.D) ++audit.d_mismatch_violations;
    if (tracker.S_plus + tracker.S_minus != sum_s) ++audit.surplus_sum_violations;

    const std::int64_t drop = v_before - tracker.V;
    if (drop < 0) ++audit.v_increase_violations;
    if (drop != 0) {
      const bool valid_event = drop == 2 && fired.rule == QaRule::R2i &&
                               fired.receiver_x_before < tracker.L && s_minus_before == 0;
      if (!valid_event) ++audit.bad_decrement_violations;
    }

    if (!check_lemma4(tracker, state).all()) ++audit.lemma4_violations;
    if (Rational(tracker.V) > v_max) ++audit.prop2_violations;
  }
  if (!audit.converged && audit.tracker_corruptions == 0) {
    audit.converged = is_average_consensus(state.x, initial_sum, n);
  }
  return audit;
}

}  // namespace qgossip
