#pragma once

#include <vector>

#include "evac/network.hpp"
#include "evac/payoff.hpp"

namespace testing {

inline evac::Graph graph_of(std::size_t n, std::vector<evac::Edge> edges) {
  return evac::Graph::from_edges(n, edges);
}

inline evac::Graph path_graph(std::size_t n) {
  std::vector<evac::Edge> edges;
  for (evac::NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return graph_of(n, edges);
}

inline evac::Graph complete_graph(std::size_t n) {
  std::vector<evac::Edge> edges;
  for (evac::NodeId i = 0; i < n; ++i)
    for (evac::NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return graph_of(n, edges);
}

// Every connected simple graph shape we care about on up to 6 nodes.
inline std::vector<evac::Graph> small_graphs() {
  return {path_graph(2),
          path_graph(3),
          complete_graph(3),
          path_graph(5),
          complete_graph(5),
          graph_of(4, {{0, 1}, {0, 2}, {0, 3}}),  // star
          graph_of(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}}),
          complete_graph(6)};
}

inline constexpr evac::Decision E = evac::Decision::Evacuate;
inline constexpr evac::Decision S = evac::Decision::Stay;

}  // namespace testing
