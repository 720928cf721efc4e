#include "qgossip/markov.hpp"

#include <algorithm>
#include <sstream>

#include "qgossip/rng.hpp"

namespace qgossip {

std::int64_t simulate_chain(const ChainSpec& chain, int start, std::mt19937_64& rng) {
  validate_chain(chain);
  const std::size_t k = chain.labels.size();
  if (start < 0 || static_cast<std::size_t>(start) >= k) {
    throw std::invalid_argument("simulate_chain: start state out of range");
  }
  std::vector<char> is_target(k, 0);
  for (int t : chain.target) is_target[static_cast<std::size_t>(t)] = 1;

  auto state = static_cast<std::size_t>(start);
  std::int64_t steps = 0;
  while (!is_target[state]) {
    const double u = uniform_unit(rng);
    double acc = 0.0;
    std::size_t next = k - 1;
    for (std::size_t j = 0; j < k; ++j) {
      acc += chain.rows[state][j];
      if (u < acc) {
        next = j;
        break;
      }
    }
    state = next;
    ++steps;
  }
  return steps;
}

ChainSpec parse_chain_file(std::istream& in) {
  std::string line;
  // header: states <k> target <labels...>
  do {
    if (!std::getline(in, line)) throw ParseError("chain file: missing header");
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
  } while (line.find_first_not_of(" \t\r") == std::string::npos);

  std::istringstream header(line);
  std::string tag;
  int k = 0;
  if (!(header >> tag >> k) || tag != "states" || k < 1) {
    throw ParseError("chain file: expected header 'states <k> target <labels...>'");
  }
  if (!(header >> tag) || tag != "target") {
    throw ParseError("chain file: expected 'target' after the state count");
  }
  ChainSpec spec;
  for (int i = 1; i <= k; ++i) spec.labels.push_back(std::to_string(i));
  std::string label;
  while (header >> label) {
    const auto it = std::find(spec.labels.begin(), spec.labels.end(), label);
    if (it == spec.labels.end()) throw ParseError("chain file: unknown target label " + label);
    spec.target.push_back(static_cast<int>(it - spec.labels.begin()));
  }
  if (spec.target.empty()) throw ParseError("chain file: at least one target label required");

  spec.rows.reserve(static_cast<std::size_t>(k));
  while (spec.rows.size() < static_cast<std::size_t>(k)) {
    if (!std::getline(in, line)) throw ParseError("chain file: fewer matrix rows than states");
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double p = 0.0;
    while (ls >> p) row.push_back(p);
    if (row.empty()) continue;
    if (row.size() != static_cast<std::size_t>(k)) {
      throw ParseError("chain file: matrix row needs exactly k entries");
    }
    spec.rows.push_back(std::move(row));
  }
  validate_chain(spec);
  return spec;
}

}  // namespace qgossip
