#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qgossip {

/// Directed edge (from, to): `from` transmits to `to`. Node labels are 1..n.
struct Edge {
  int from = 0;
  int to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple digraph on nodes 1..n: no self-loops, no duplicate edges, n >= 2.
/// Immutable after construction and safely shareable across threads.
class Digraph {
 public:
  Digraph(int node_count, std::vector<Edge> edges);

  int node_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// All n(n-1) ordered pairs.
Digraph complete_digraph(int node_count);

/// Directed path 1 -> 2 -> ... -> n.
Digraph path_digraph(int node_count);

/// Directed cycle 1 -> 2 -> ... -> n -> 1.
Digraph ring_digraph(int node_count);

/// True iff some node is reachable from every other node via directed paths.
bool has_globally_reachable_node(const Digraph& g);

/// True iff the edge count equals n(n-1).
bool is_complete(const Digraph& g);

/// Per-edge activation probabilities whose support is exactly the digraph's
/// edge list. Every weight lies in (0, 1) and the weights sum to 1 within
/// 1e-12. Immutable; sampling is inverse-CDF over a cumulative table.
class ActivationModel {
 public:
  ActivationModel(const Digraph& g, std::vector<double> probabilities);

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

  Edge sample(std::mt19937_64& rng) const;

 private:
  std::vector<Edge> edges_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// Uniform activation: every edge weighted 1/|E|.
ActivationModel uniform_activation(const Digraph& g);

Edge sample_edge(const ActivationModel& model, std::mt19937_64& rng);

/// A parsed graph plus the activation model when the source carried explicit
/// probabilities (uniform is assumed otherwise).
struct GraphInput {
  Digraph graph;
  std::optional<ActivationModel> model;

  ActivationModel resolve_model() const {
    return model ? *model : uniform_activation(graph);
  }
};

/// Accepts "complete:<n>", "path:<n>", "ring:<n>", or a path to an edge-list
/// file ("n <count>" header, then one "j i [p_ji]" line per edge).
GraphInput parse_graph_spec(const std::string& spec);

GraphInput read_edge_list(std::istream& in);

}  // namespace qgossip
