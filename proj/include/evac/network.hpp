#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace evac {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable simple undirected graph in compressed adjacency form.
// Neighbor lists are sorted; every node has degree >= 1.
class Graph {
 public:
  Graph() = default;

  // Validates symmetry-free input: rejects self-loops, duplicate edges,
  // out-of-range ids and isolated nodes (ConfigError).
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId node) const noexcept {
    return {neighbors_.data() + offsets_[node], neighbors_.data() + offsets_[node + 1]};
  }
  std::size_t degree(NodeId node) const noexcept { return offsets_[node + 1] - offsets_[node]; }
  bool has_edge(NodeId a, NodeId b) const noexcept;

  // Each undirected edge once, as (low, high), in ascending order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

// degree -> number of nodes with that degree.
using DegreeHistogram = std::map<std::size_t, std::size_t>;

DegreeHistogram degree_histogram(const Graph& graph);

// The 5,000-node degree distribution behind the published threshold
// fractions: {9:2, 8:19, 7:168, 6:774, 5:1886, 4:2061, 3:30, 2:60}.
DegreeHistogram reference_histogram();

// Ring lattice of n nodes, each linked to k/2 neighbours per side, then each
// lattice edge has its far endpoint rewired with probability rewire_prob.
// Requires n > k >= 2 with k even. Retries with derived seeds until the
// result is connected.
Graph generate_small_world(std::size_t n, std::size_t k, double rewire_prob, std::uint64_t seed);

// Configuration model with an exact degree multiset. Self-loops and
// multi-edges from stub matching are repaired by degree-preserving double
// edge swaps (at most 100 x edge_count attempts).
Graph generate_from_histogram(const DegreeHistogram& histogram, std::uint64_t seed);

// Whitespace separated "i j" pairs, 0-based ids, one edge per line.
// Blank lines and lines starting with '#' are ignored.
Graph read_edge_list(std::istream& in, const std::string& source_name = "<stream>");
Graph load_edge_list(const std::filesystem::path& path);
void write_edge_list(const Graph& graph, std::ostream& out);
void save_edge_list(const Graph& graph, const std::filesystem::path& path);

enum class RankOrder { HighestFirst, LowestFirst };

struct DegreeClass {
  std::size_t degree = 0;
  std::size_t count = 0;
  // Nodes in this class plus all classes ranked before it.
  std::size_t cumulative = 0;
};

// Nodes ordered by degree. Within one degree class the order is a shuffle
// seeded by tie_seed.
struct DegreeRank {
  RankOrder order = RankOrder::HighestFirst;
  std::vector<NodeId> ranked_nodes;
  std::vector<DegreeClass> classes;
  std::size_t node_count = 0;

  // Cumulative fraction covered once classes[i] is fully included.
  double threshold(std::size_t class_index) const {
    return static_cast<double>(classes.at(class_index).cumulative) / static_cast<double>(node_count);
  }
  std::vector<std::pair<std::size_t, double>> cumulative_thresholds() const;
};

DegreeRank degree_rank(const Graph& graph, RankOrder order, std::uint64_t tie_seed = 0);

}  // namespace evac
