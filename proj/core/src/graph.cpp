#include "qgossip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "qgossip/errors.hpp"
#include "qgossip/rng.hpp"

namespace qgossip {

Digraph::Digraph(int node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)) {
  if (n_ < 2) throw std::invalid_argument("Digraph: node count must be at least 2");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges_) {
    if (e.from < 1 || e.from > n_ || e.to < 1 || e.to > n_) {
      throw std::invalid_argument("Digraph: edge endpoint out of range");
    }
    if (e.from == e.to) throw std::invalid_argument("Digraph: self-loop edges are not allowed");
    if (!seen.emplace(e.from, e.to).second) {
      throw std::invalid_argument("Digraph: duplicate edge");
    }
  }
}

Digraph complete_digraph(int node_count) {
  if (node_count < 2) throw std::invalid_argument("complete_digraph: node count must be >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(node_count) * (node_count - 1));
  for (int j = 1; j <= node_count; ++j) {
    for (int i = 1; i <= node_count; ++i) {
      if (i != j) edges.push_back({j, i});
    }
  }
  return Digraph(node_count, std::move(edges));
}

Digraph path_digraph(int node_count) {
  std::vector<Edge> edges;
  for (int j = 1; j < node_count; ++j) edges.push_back({j, j + 1});
  return Digraph(node_count, std::move(edges));
}

Digraph ring_digraph(int node_count) {
  std::vector<Edge> edges;
  for (int j = 1; j < node_count; ++j) edges.push_back({j, j + 1});
  edges.push_back({node_count, 1});
  return Digraph(node_count, std::move(edges));
}

bool is_complete(const Digraph& g) {
  const auto n = static_cast<std::size_t>(g.node_count());
  return g.edges().size() == n * (n - 1);
}

bool has_globally_reachable_node(const Digraph& g) {
  const int n = g.node_count();
  // Reversed adjacency: a node v is globally reachable iff the reverse search
  // from v covers all nodes.
  std::vector<std::vector<int>> reverse_adj(static_cast<std::size_t>(n) + 1);
  for (const Edge& e : g.edges()) reverse_adj[static_cast<std::size_t>(e.to)].push_back(e.from);

  std::vector<char> visited(static_cast<std::size_t>(n) + 1);
  for (int v = 1; v <= n; ++v) {
    std::fill(visited.begin(), visited.end(), 0);
    std::deque<int> queue{v};
    visited[static_cast<std::size_t>(v)] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int w : reverse_adj[static_cast<std::size_t>(u)]) {
        if (!visited[static_cast<std::size_t>(w)]) {
          visited[static_cast<std::size_t>(w)] = 1;
          ++reached;
          queue.push_back(w);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

ActivationModel::ActivationModel(const Digraph& g, std::vector<double> probabilities)
    : edges_(g.edges()), probabilities_(std::move(probabilities)) {
  if (probabilities_.size() != edges_.size()) {
    throw std::invalid_argument("ActivationModel: one probability per edge required");
  }
  if (edges_.empty()) throw std::invalid_argument("ActivationModel: digraph has no edges");
  double sum = 0.0;
  cumulative_.reserve(edges_.size());
  for (double p : probabilities_) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw std::invalid_argument("ActivationModel: every probability must lie in (0, 1)");
    }
    sum += p;
    cumulative_.push_back(sum);
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("ActivationModel: probabilities must sum to 1");
  }
  cumulative_.back() = 1.0;
}

Edge ActivationModel::sample(std::mt19937_64& rng) const {
  const double u = uniform_unit(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t idx =
      it == cumulative_.end() ? cumulative_.size() - 1
                              : static_cast<std::size_t>(it - cumulative_.begin());
  return edges_[idx];
}

ActivationModel uniform_activation(const Digraph& g) {
  const std::size_t m = g.edges().size();
  if (m == 0) throw std::invalid_argument("uniform_activation: digraph has no edges");
  return ActivationModel(g, std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Edge sample_edge(const ActivationModel& model, std::mt19937_64& rng) {
  return model.sample(rng);
}

namespace {

int parse_spec_count(const std::string& spec, const std::string& prefix) {
  const std::string body = spec.substr(prefix.size());
  std::size_t pos = 0;
  int n = 0;
  try {
    n = std::stoi(body, &pos);
  } catch (const std::exception&) {
    throw ParseError("graph spec: cannot parse node count in '" + spec + "'");
  }
  if (pos != body.size()) throw ParseError("graph spec: trailing characters in '" + spec + "'");
  return n;
}

}  // namespace

GraphInput read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::size_t declared_edges = 0;
  std::vector<Edge> edges;
  std::vector<double> probabilities;
  bool any_prob = false;
  bool header_seen = false;

  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (!header_seen) {
      std::string tag;
      if (!(ls >> tag)) continue;  // blank line
      if (tag != "n") throw ParseError("edge list: expected header 'n <count>'");
      long long count = 0;
      if (!(ls >> n >> count) || n < 2 || count < 0) {
        throw ParseError("edge list: malformed header");
      }
      declared_edges = static_cast<std::size_t>(count);
      header_seen = true;
      continue;
    }
    int j = 0;
    int i = 0;
    if (!(ls >> j)) continue;  // blank line
    if (!(ls >> i)) throw ParseError("edge list: edge line needs at least 'j i'");
    double p = 0.0;
    if (ls >> p) {
      if (!any_prob && !edges.empty()) {
        throw ParseError("edge list: either all edges carry probabilities or none");
      }
      any_prob = true;
      probabilities.push_back(p);
    } else if (any_prob) {
      throw ParseError("edge list: either all edges carry probabilities or none");
    }
    edges.push_back({j, i});
  }
  if (!header_seen) throw ParseError("edge list: missing header");
  if (declared_edges != edges.size()) {
    throw ParseError("edge list: header count does not match number of edge lines");
  }

  Digraph g(n, std::move(edges));
  if (!any_prob) return GraphInput{std::move(g), std::nullopt};
  ActivationModel model(g, std::move(probabilities));
  return GraphInput{std::move(g), std::move(model)};
}

GraphInput parse_graph_spec(const std::string& spec) {
  if (spec.rfind("complete:", 0) == 0) {
    return GraphInput{complete_digraph(parse_spec_count(spec, "complete:")), std::nullopt};
  }
  if (spec.rfind("path:", 0) == 0) {
    return GraphInput{path_digraph(parse_spec_count(spec, "path:")), std::nullopt};
  }
  if (spec.rfind("ring:", 0) == 0) {
    return GraphInput{ring_digraph(parse_spec_count(spec, "ring:")), std::nullopt};
  }
  std::ifstream file(spec);
  if (!file) throw ParseError("graph spec: '" + spec + "' is not a builtin spec or readable file");
  return read_edge_list(file);
}

}  // namespace qgossip
