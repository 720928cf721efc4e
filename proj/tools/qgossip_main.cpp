#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgossip/bounds.hpp"
#include "qgossip/errors.hpp"
#include "qgossip/experiments.hpp"
#include "qgossip/markov.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qgossip;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string fixed9(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9f", v);
  return buffer;
}

struct OutputTarget {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream file(path);
    if (!file) throw ParseError("cannot open output file '" + path + "'");
    file << text;
  }
};

/// JSON config mirroring the flags; explicit command-line options win.
class ConfigFile {
 public:
  explicit ConfigFile(const std::string& path) {
    if (path.empty()) return;
    std::ifstream file(path);
    if (!file) throw ParseError("cannot open config file '" + path + "'");
    try {
      file >> json_;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("config file: ") + e.what());
    }
  }

  template <typename T>
  void fill(const CLI::App* cmd, const std::string& flag, T& value) const {
    if (json_.is_null()) return;
    if (cmd->get_option("--" + flag)->count() > 0) return;
    if (!json_.contains(flag)) return;
    try {
      value = json_.at(flag).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("config file: field '" + flag + "' has the wrong type");
    }
  }

  bool has(const std::string& key) const { return !json_.is_null() && json_.contains(key); }

  template <typename T>
  T get(const std::string& key) const {
    return json_.at(key).get<T>();
  }

  std::string subcommand() const {
    return has("subcommand") ? json_.at("subcommand").get<std::string>() : std::string();
  }

 private:
  nlohmann::json json_;
};

std::string stats_csv(const std::string& algorithm, int n, std::int64_t trials,
                      std::uint64_t seed, const TrialStats& stats, double bound, bool header) {
  std::ostringstream out;
  if (header) out << "algorithm,n,trials,seed,mean,se,min,max,failures,bound\n";
  out << algorithm << ',' << n << ',' << trials << ',' << seed << ',' << fixed9(stats.mean)
      << ',' << fixed9(stats.se) << ',' << stats.min << ',' << stats.max << ',' << stats.failures
      << ',' << fixed9(bound) << '\n';
  return out.str();
}

ordered_json stats_json(const std::string& algorithm, int n, std::int64_t trials,
                        std::uint64_t seed, const TrialStats& stats, double bound) {
  ordered_json row;
  row["algorithm"] = algorithm;
  row["n"] = n;
  row["trials"] = trials;
  row["seed"] = seed;
  row["mean"] = stats.mean;
  row["se"] = stats.se;
  row["min"] = stats.min;
  row["max"] = stats.max;
  row["failures"] = stats.failures;
  row["bound"] = bound;
  return row;
}

std::string stats_table(const std::string& algorithm, int n, std::int64_t trials,
                        std::uint64_t seed, const TrialStats& stats, double bound) {
  std::ostringstream out;
  out << "algorithm  " << algorithm << '\n'
      << "n          " << n << '\n'
      << "trials     " << trials << '\n'
      << "seed       " << seed << '\n'
      << "mean       " << fixed9(stats.mean) << '\n'
      << "se         " << fixed9(stats.se) << '\n'
      << "min        " << stats.min << '\n'
      << "max        " << stats.max << '\n'
      << "failures   " << stats.failures << '\n'
      << "bound      " << fixed9(bound) << '\n';
  return out.str();
}

double bound_for(const ExperimentConfig& config, int n) {
  const StateVector x0 = parse_init_spec(config.init_spec);
  const IntervalStats hull = interval_stats(x0);
  if (config.algorithm == Algorithm::Qc) return theorem1_bound(n, hull.min, hull.max);
  std::int64_t sum = 0;
  for (std::int64_t v : x0) sum += v;
  const SumDecomposition lr = decompose_sum(sum, n);
  return theorem2_bound(n, hull.min, hull.max, lr.remainder);
}

int cmd_simulate(const ExperimentConfig& config, const std::string& format,
                 const OutputTarget& output, const std::string& trace_path) {
  GraphInput input = parse_graph_spec(config.graph_spec);
  const int n = input.graph.node_count();
  const double bound = bound_for(config, n);

  if (!trace_path.empty()) {
    if (config.algorithm != Algorithm::Qa) {
      throw ParseError("--trace records the Lyapunov descent and needs --alg qa");
    }
    if (config.trials != 1) throw ParseError("--trace needs --trials 1");
    std::ofstream trace(trace_path);
    if (!trace) throw ParseError("cannot open trace file '" + trace_path + "'");
    const StateVector x0 = parse_init_spec(config.init_spec);
    LyapunovTracker tracker(x0);
    tracker.set_trace(&trace);
    run_qa(input.graph, input.resolve_model(), x0, config.seed, config.max_steps, &tracker);
  }

  if (config.algorithm == Algorithm::Qc && !has_globally_reachable_node(input.graph)) {
    std::cerr << "warning: digraph has no globally reachable node; QC consensus is not "
                 "guaranteed\n";
  }
  // the bound column presumes uniform activation on a complete digraph
  bool uniform = !input.model.has_value();
  if (input.model) {
    const auto& probs = input.model->probabilities();
    uniform = true;
    for (double p : probs) {
      if (std::fabs(p - probs.front()) > 1e-12) uniform = false;
    }
  }
  if (!uniform || !is_complete(input.graph)) {
    std::cerr << "warning: bound column assumes uniform activation on a complete digraph\n";
  }

  const TrialStats stats = run_ensemble(config);
  const std::string algorithm(algorithm_name(config.algorithm));
  if (format == "csv") {
    output.write(stats_csv(algorithm, n, config.trials, config.seed, stats, bound, true));
  } else if (format == "json") {
    output.write(stats_json(algorithm, n, config.trials, config.seed, stats, bound).dump(2) +
                 "\n");
  } else {
    output.write(stats_table(algorithm, n, config.trials, config.seed, stats, bound));
  }
  return stats.failures > 0 ? kExitRuntime : kExitOk;
}

std::vector<int> parse_n_list(const std::string& list) {
  std::vector<int> values;
  std::string body = list;
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream stream(body);
  int v = 0;
  while (stream >> v) values.push_back(v);
  if (!stream.eof() || values.empty()) throw ParseError("sweep: cannot parse --n '" + list + "'");
  return values;
}

int cmd_sweep(Algorithm algorithm, const std::vector<int>& n_values, std::int64_t trials,
              std::uint64_t seed, const std::string& format, const OutputTarget& output) {
  const std::vector<SweepRow> rows = sweep(algorithm, n_values, trials, seed);
  const std::string name(algorithm_name(algorithm));
  std::int64_t failures = 0;
  if (format == "json") {
    ordered_json doc = ordered_json::array();
    for (const SweepRow& row : rows) {
      doc.push_back(stats_json(name, row.n, row.trials, row.seed, row.stats, row.bound));
      failures += row.stats.failures;
    }
    output.write(doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    bool header = true;
    for (const SweepRow& row : rows) {
      out << stats_csv(name, row.n, row.trials, row.seed, row.stats, row.bound, header);
      header = false;
      failures += row.stats.failures;
    }
    output.write(out.str());
  }
  return failures > 0 ? kExitRuntime : kExitOk;
}

struct NamedChain {
  ChainSpec spec;
  // closed-form companion values when the argument names a builder family
  std::vector<std::pair<std::string, double>> closed_form;  // state label -> value
  std::optional<double> lower_row_bound;
  std::string lower_row_state;
};

std::vector<std::int64_t> split_numbers(const std::string& body) {
  std::vector<std::int64_t> numbers;
  std::istringstream stream(body);
  std::string token;
  while (std::getline(stream, token, ':')) {
    try {
      std::size_t pos = 0;
      numbers.push_back(std::stoll(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("chain spec: cannot parse number '" + token + "'");
    }
  }
  return numbers;
}

NamedChain resolve_chain(const std::string& spec_string) {
  NamedChain named;
  if (spec_string.rfind("chain-i:", 0) == 0) {
    const auto nums = split_numbers(spec_string.substr(8));
    if (nums.size() != 1) throw ParseError("chain spec: chain-i:<n>");
    const auto params = build_chain_i_qc(static_cast<int>(nums[0]));
    named.spec = to_chain_spec(params);
    for (int z = 1; z <= params.length - 1; ++z) {
      named.closed_form.emplace_back(std::to_string(z), chain_i_closed_form(params, z));
    }
    return named;
  }
  if (spec_string.rfind("chain-ii-maxdecay:", 0) == 0) {
    const auto nums = split_numbers(spec_string.substr(18));
    if (nums.size() != 2) throw ParseError("chain spec: chain-ii-maxdecay:<n>:<R>");
    const auto params =
        build_chain_ii_qa_maxdecay(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
    named.spec = to_chain_spec(params);
    for (int z = 1; z <= params.length - 1; ++z) {
      named.closed_form.emplace_back(std::to_string(z), chain_ii_closed_form(params, z));
    }
    return named;
  }
  const bool l1 = spec_string.rfind("chain-iii-l1:", 0) == 0;
  const bool lgeq2 = spec_string.rfind("chain-iii-lgeq2:", 0) == 0;
  if (l1 || lgeq2) {
    const auto nums = split_numbers(spec_string.substr(l1 ? 13 : 16));
    if (nums.size() != 1) throw ParseError("chain spec: chain-iii-l1:<n> / chain-iii-lgeq2:<n>");
    const int n = static_cast<int>(nums[0]);
    const auto params = l1 ? build_chain_iii_l1(n) : build_chain_iii_lgeq2(n);
    named.spec = to_chain_spec(params);
    const auto [exact_upper, lower_bound] = chain_iii_closed_form(params);
    named.closed_form.emplace_back(std::to_string(n - 1) + "u", exact_upper);
    named.lower_row_bound = lower_bound;
    named.lower_row_state = std::to_string(n - 1) + "l";
    return named;
  }
  std::ifstream file(spec_string);
  if (!file) {
    throw ParseError("chain spec: '" + spec_string +
                     "' is neither a builder name nor a readable file");
  }
  named.spec = parse_chain_file(file);
  return named;
}

int cmd_hitting_time(const std::string& chain_spec, const std::string& format,
                     const OutputTarget& output) {
  const NamedChain named = resolve_chain(chain_spec);
  const std::vector<double> solved = solve_hitting_times(named.spec);

  const auto closed_form_for = [&](const std::string& label) -> std::optional<double> {
    for (const auto& [state, value] : named.closed_form) {
      if (state == label) return value;
    }
    return std::nullopt;
  };

  if (format == "json") {
    ordered_json doc;
    doc["chain"] = chain_spec;
    doc["states"] = ordered_json::array();
    for (std::size_t i = 0; i < named.spec.labels.size(); ++i) {
      ordered_json entry;
      entry["state"] = named.spec.labels[i];
      entry["solver"] = solved[i];
      if (const auto cf = closed_form_for(named.spec.labels[i])) {
        entry["closed_form"] = *cf;
        entry["abs_diff"] = std::fabs(*cf - solved[i]);
      }
      doc["states"].push_back(entry);
    }
    if (named.lower_row_bound) {
      doc["lower_row_bound"] =
          ordered_json{{"state", named.lower_row_state}, {"bound", *named.lower_row_bound}};
    }
    output.write(doc.dump(2) + "\n");
    return kExitOk;
  }

  std::ostringstream out;
  if (format == "csv") {
    out << "state,solver,closed_form,abs_diff\n";
    for (std::size_t i = 0; i < named.spec.labels.size(); ++i) {
      out << named.spec.labels[i] << ',' << fixed9(solved[i]);
      if (const auto cf = closed_form_for(named.spec.labels[i])) {
        out << ',' << fixed9(*cf) << ',' << fixed9(std::fabs(*cf - solved[i]));
      } else {
        out << ",,";
      }
      out << '\n';
    }
  } else {
    for (std::size_t i = 0; i < named.spec.labels.size(); ++i) {
      out << "E[" << named.spec.labels[i] << "] = " << fixed9(solved[i]);
      if (const auto cf = closed_form_for(named.spec.labels[i])) {
        out << "   closed form " << fixed9(*cf) << "   diff "
            << fixed9(std::fabs(*cf - solved[i]));
      }
      out << '\n';
    }
  }
  if (named.lower_row_bound) {
    out << "lower-row bound: E[" << named.lower_row_state << "] < "
        << fixed9(*named.lower_row_bound) << '\n';
  }
  output.write(out.str());
  return kExitOk;
}

int cmd_bounds(int n, std::int64_t m, std::int64_t big_m, std::int64_t r,
               const std::string& format, const OutputTarget& output) {
  const BoundReport report = make_bound_report(n, m, big_m, r);
  if (format == "json") {
    ordered_json doc;
    doc["n"] = report.n;
    doc["m"] = report.m;
    doc["M"] = report.M;
    doc["R"] = report.R;
    doc["theorem1"] = report.theorem1;
    doc["lemma3"] = report.lemma3;
    doc["theorem2"] = report.theorem2;
    doc["prop2_vmax"] = report.prop2_vmax;
    doc["prop3_onestep"] = report.prop3_onestep;
    doc["prop4_onedecay"] =
        report.prop4_onedecay ? ordered_json(*report.prop4_onedecay) : ordered_json(nullptr);
    doc["eq15_decrement_count"] = report.eq15_decrement_count;
    doc["eq19_decay_budget"] = report.eq19_decay_budget ? ordered_json(*report.eq19_decay_budget)
                                                        : ordered_json(nullptr);
    output.write(doc.dump(2) + "\n");
    return kExitOk;
  }
  std::ostringstream out;
  out << "n=" << report.n << " m=" << report.m << " M=" << report.M << " R=" << report.R << '\n'
      << "theorem1              " << fixed9(report.theorem1) << '\n'
      << "lemma3                " << fixed9(report.lemma3) << '\n'
      << "theorem2              " << fixed9(report.theorem2) << '\n'
      << "prop2_vmax            " << fixed9(report.prop2_vmax) << '\n'
      << "prop3_onestep         " << fixed9(report.prop3_onestep) << '\n'
      << "prop4_onedecay        "
      << (report.prop4_onedecay ? fixed9(*report.prop4_onedecay) : std::string("n/a")) << '\n'
      << "eq15_decrement_count  " << report.eq15_decrement_count << '\n'
      << "eq19_decay_budget     "
      << (report.eq19_decay_budget ? std::to_string(*report.eq19_decay_budget)
                                   : std::string("n/a"))
      << '\n';
  output.write(out.str());
  return kExitOk;
}

int cmd_verify(const std::string& depth_name, std::uint64_t seed, const std::string& trace_path,
               const std::string& format, const OutputTarget& output) {
  if (!trace_path.empty()) {
    // sample trace: the QA worst case at n = 4 descends through one level
    std::ofstream trace(trace_path);
    if (!trace) throw ParseError("cannot open trace file '" + trace_path + "'");
    const Digraph g = complete_digraph(4);
    const StateVector x0 = qa_worst_init(4);
    LyapunovTracker tracker(x0);
    tracker.set_trace(&trace);
    run_qa(g, uniform_activation(g), x0, seed, 0, &tracker);
  }
  const VerifyReport report = verify_suite(parse_verify_depth(depth_name), seed);
  if (format == "json") {
    ordered_json doc;
    doc["depth"] = depth_name;
    doc["seed"] = seed;
    doc["checks"] = ordered_json::array();
    for (const CheckResult& check : report.checks) {
      doc["checks"].push_back(ordered_json{
          {"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
    }
    doc["all_passed"] = report.all_passed();
    output.write(doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    for (const CheckResult& check : report.checks) {
      out << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
          << '\n';
    }
    out << (report.all_passed() ? "all checks passed" : "CHECKS FAILED") << '\n';
    output.write(out.str());
  }
  return report.all_passed() ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized gossip consensus/averaging simulator and hitting-time analytics"};
  app.require_subcommand(0, 1);

  std::string config_path;
  const char* config_help = "JSON file mirroring the subcommand flags";
  app.add_option("--config", config_path, config_help);

  // simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo ensemble of one protocol");
  simulate->add_option("--config", config_path, config_help);
  std::string sim_alg = "qc";
  std::string sim_graph;
  std::string sim_init;
  std::int64_t sim_trials = 2000;
  std::uint64_t sim_seed = 0;
  std::int64_t sim_max_steps = 0;
  std::string sim_policy = "adopt";
  std::string sim_format = "table";
  std::string sim_output;
  std::string sim_trace;
  simulate->add_option("--alg", sim_alg, "qc or qa");
  simulate->add_option("--graph", sim_graph, "graph spec or edge-list file");
  simulate->add_option("--init", sim_init, "initial-state spec");
  simulate->add_option("--trials", sim_trials, "number of independent trials");
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--max-steps", sim_max_steps, "step budget per trial (0 = default)");
  simulate->add_option("--policy", sim_policy, "QC interval policy: adopt or step");
  simulate->add_option("--format", sim_format, "csv, json, or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  simulate->add_option("--output", sim_output, "write to file instead of stdout");
  simulate->add_option("--trace", sim_trace, "Lyapunov trace CSV (qa, --trials 1)");

  // sweep ------------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "worst-case ensembles across node counts");
  sweep_cmd->add_option("--config", config_path, config_help);
  std::string sweep_alg = "qc";
  std::string sweep_n = "4,8,16";
  std::int64_t sweep_trials = 2000;
  std::uint64_t sweep_seed = 0;
  std::string sweep_format = "csv";
  std::string sweep_output;
  sweep_cmd->add_option("--alg", sweep_alg, "qc or qa");
  sweep_cmd->add_option("--n", sweep_n, "comma-separated node counts, ascending");
  sweep_cmd->add_option("--trials", sweep_trials, "trials per node count");
  sweep_cmd->add_option("--seed", sweep_seed, "master seed");
  sweep_cmd->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--output", sweep_output, "write to file instead of stdout");

  // hitting-time -----------------------------------------------------------
  auto* hitting = app.add_subcommand("hitting-time", "mean hitting times of a chain");
  hitting->add_option("--config", config_path, config_help);
  std::string chain_spec;
  std::string hit_format = "table";
  std::string hit_output;
  hitting->add_option("chain", chain_spec,
                      "chain-i:<n>, chain-ii-maxdecay:<n>:<R>, chain-iii-l1:<n>, "
                      "chain-iii-lgeq2:<n>, or a matrix file");
  hitting->add_option("--format", hit_format, "csv, json, or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  hitting->add_option("--output", hit_output, "write to file instead of stdout");

  // bounds -----------------------------------------------------------------
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form convergence-time bounds");
  bounds_cmd->add_option("--config", config_path, config_help);
  int bounds_n = 0;
  std::int64_t bounds_m = 0;
  std::int64_t bounds_M = 0;
  std::int64_t bounds_R = 0;
  std::string bounds_format = "table";
  std::string bounds_output;
  bounds_cmd->add_option("--n", bounds_n, "node count");
  bounds_cmd->add_option("--m", bounds_m, "smallest initial state");
  bounds_cmd->add_option("--M", bounds_M, "largest initial state");
  bounds_cmd->add_option("--R", bounds_R, "remainder of the initial sum mod n");
  bounds_cmd->add_option("--format", bounds_format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  bounds_cmd->add_option("--output", bounds_output, "write to file instead of stdout");

  // verify -----------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run the oracle/invariant/dominance checks");
  verify->add_option("--config", config_path, config_help);
  std::string verify_depth = "small";
  std::uint64_t verify_seed = 0;
  std::string verify_trace;
  std::string verify_format = "table";
  std::string verify_output;
  verify->add_option("--depth", verify_depth, "small or full")
      ->check(CLI::IsMember({"small", "full"}));
  verify->add_option("--seed", verify_seed, "master seed (required: no silent nondeterminism)");
  verify->add_option("--trace", verify_trace, "also write a sample Lyapunov trace CSV");
  verify->add_option("--format", verify_format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  verify->add_option("--output", verify_output, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ConfigFile config(config_path);

    std::string selected;
    if (!app.get_subcommands().empty()) {
      selected = app.get_subcommands().front()->get_name();
    } else if (!config.subcommand().empty()) {
      selected = config.subcommand();
    } else {
      std::cerr << "error: no subcommand given (see --help)\n";
      return kExitUsage;
    }

    if (selected == "simulate") {
      config.fill(simulate, "alg", sim_alg);
      config.fill(simulate, "graph", sim_graph);
      config.fill(simulate, "init", sim_init);
      config.fill(simulate, "trials", sim_trials);
      config.fill(simulate, "seed", sim_seed);
      config.fill(simulate, "max-steps", sim_max_steps);
      config.fill(simulate, "policy", sim_policy);
      config.fill(simulate, "format", sim_format);
      config.fill(simulate, "output", sim_output);
      config.fill(simulate, "trace", sim_trace);
      if (sim_graph.empty() || sim_init.empty()) {
        throw ParseError("simulate needs --graph and --init (flags or config file)");
      }
      ExperimentConfig experiment;
      experiment.algorithm = parse_algorithm(sim_alg);
      experiment.graph_spec = sim_graph;
      experiment.init_spec = sim_init;
      experiment.trials = sim_trials;
      experiment.seed = sim_seed;
      experiment.max_steps = sim_max_steps;
      if (sim_policy == "adopt") {
        experiment.policy = QcPolicy::adopt();
      } else if (sim_policy == "step") {
        experiment.policy = QcPolicy::step();
      } else {
        throw ParseError("unknown policy '" + sim_policy + "' (expected adopt or step)");
      }
      return cmd_simulate(experiment, sim_format, OutputTarget{sim_output}, sim_trace);
    }
    if (selected == "sweep") {
      config.fill(sweep_cmd, "alg", sweep_alg);
      config.fill(sweep_cmd, "n", sweep_n);
      config.fill(sweep_cmd, "trials", sweep_trials);
      config.fill(sweep_cmd, "seed", sweep_seed);
      config.fill(sweep_cmd, "format", sweep_format);
      config.fill(sweep_cmd, "output", sweep_output);
      return cmd_sweep(parse_algorithm(sweep_alg), parse_n_list(sweep_n), sweep_trials,
                       sweep_seed, sweep_format, OutputTarget{sweep_output});
    }
    if (selected == "hitting-time") {
      if (chain_spec.empty() && config.has("chain")) {
        chain_spec = config.get<std::string>("chain");
      }
      config.fill(hitting, "format", hit_format);
      config.fill(hitting, "output", hit_output);
      if (chain_spec.empty()) throw ParseError("hitting-time needs a chain spec");
      return cmd_hitting_time(chain_spec, hit_format, OutputTarget{hit_output});
    }
    if (selected == "bounds") {
      config.fill(bounds_cmd, "n", bounds_n);
      config.fill(bounds_cmd, "m", bounds_m);
      config.fill(bounds_cmd, "M", bounds_M);
      config.fill(bounds_cmd, "R", bounds_R);
      config.fill(bounds_cmd, "format", bounds_format);
      config.fill(bounds_cmd, "output", bounds_output);
      if (bounds_n < 2) throw ParseError("bounds needs --n of at least 2");
      return cmd_bounds(bounds_n, bounds_m, bounds_M, bounds_R, bounds_format,
                        OutputTarget{bounds_output});
    }
    if (selected == "verify") {
      config.fill(verify, "depth", verify_depth);
      config.fill(verify, "seed", verify_seed);
      config.fill(verify, "trace", verify_trace);
      config.fill(verify, "format", verify_format);
      config.fill(verify, "output", verify_output);
      if (verify->get_option("--seed")->count() == 0 && !config.has("seed")) {
        throw ParseError("verify needs an explicit --seed (no silent nondeterminism)");
      }
      return cmd_verify(verify_depth, verify_seed, verify_trace, verify_format,
                        OutputTarget{verify_output});
    }
    std::cerr << "error: unknown subcommand '" << selected << "'\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedTopologyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NoFiniteHittingTimeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (after " << e.steps_taken() << " steps)\n";
    return kExitRuntime;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
