#include "evac/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "evac/error.hpp"
#include "evac/rng.hpp"

namespace evac {

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

bool is_connected(const Graph& graph) {
  const std::size_t n = graph.node_count();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : graph.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

// Erdos-Gallai test on a non-increasing degree sequence.
bool is_graphical(const std::vector<std::size_t>& desc) {
  const std::size_t n = desc.size();
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + desc[i];
  if (prefix[n] % 2 != 0) return false;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::uint64_t lhs = prefix[k];
    // First index (>= k) whose degree drops below k.
    const auto first_small = std::partition_point(desc.begin() + static_cast<std::ptrdiff_t>(k), desc.end(),
                                                  [k](std::size_t d) { return d >= k; });
    const auto split = static_cast<std::size_t>(first_small - desc.begin());
    const std::uint64_t rhs = std::uint64_t{k} * (k - 1) + std::uint64_t{k} * (split - k) + (prefix[n] - prefix[split]);
    if (lhs > rhs) return false;
  }
  return true;
}

// Contribution of a single edge copy to the repair objective: self-loops and
// every copy beyond the first of a repeated pair count as one defect each.
struct MultiEdgeCounter {
  std::unordered_map<std::uint64_t, std::uint32_t> counts;

  std::uint32_t count(NodeId a, NodeId b) const {
    const auto it = counts.find(edge_key(a, b));
    return it == counts.end() ? 0 : it->second;
  }
  void add(NodeId a, NodeId b) { ++counts[edge_key(a, b)]; }
  void remove(NodeId a, NodeId b) {
    const auto it = counts.find(edge_key(a, b));
    if (--it->second == 0) counts.erase(it);
  }
  bool defective(NodeId a, NodeId b) const { return a == b || count(a, b) > 1; }
};

}  // namespace

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
  if (node_count == 0) throw ConfigError("graph must have at least one node");
  if (node_count > std::numeric_limits<NodeId>::max()) throw ConfigError("graph too large for 32-bit node ids");

  std::vector<std::size_t> degree(node_count, 0);
  for (const auto& [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw ConfigError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") references a node outside [0, " +
                        std::to_string(node_count) + ")");
    }
    if (a == b) throw ConfigError("self-loop on node " + std::to_string(a));
    ++degree[a];
    ++degree[b];
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    if (degree[i] == 0) throw ConfigError("node " + std::to_string(i) + " is isolated");
  }

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.neighbors_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    g.neighbors_[fill[a]++] = b;
    g.neighbors_[fill[b]++] = a;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
    auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
    std::sort(first, last);
    if (const auto dup = std::adjacent_find(first, last); dup != last) {
      throw ConfigError("duplicate edge (" + std::to_string(i) + ", " + std::to_string(*dup) + ")");
    }
  }
  return g;
}

bool Graph::has_edge(NodeId a, NodeId b) const noexcept {
  const auto adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

DegreeHistogram degree_histogram(const Graph& graph) {
  DegreeHistogram hist;
  for (NodeId u = 0; u < graph.node_count(); ++u) ++hist[graph.degree(u)];
  return hist;
}

DegreeHistogram reference_histogram() {
  return {{9, 2}, {8, 19}, {7, 168}, {6, 774}, {5, 1886}, {4, 2061}, {3, 30}, {2, 60}};
}

Graph generate_small_world(std::size_t n, std::size_t k, double rewire_prob, std::uint64_t seed) {
  if (k < 2 || k % 2 != 0) throw ConfigError("small-world k must be even and >= 2, got " + std::to_string(k));
  if (n <= k) throw ConfigError("small-world requires n > k");
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) throw ConfigError("rewire probability must lie in [0, 1]");

  constexpr std::uint32_t kMaxAttempts = 1000;
  const std::size_t half = k / 2;
  for (std::uint32_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    rng::SequentialEngine engine(seed, rng::Stream::GraphConstruction, attempt);
    std::vector<std::unordered_set<NodeId>> adjacency(n);
    // Edge (u, lattice offset j) keeps endpoint u; only its far end moves.
    std::vector<NodeId> far_end(n * half);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t j = 1; j <= half; ++j) {
        const auto v = static_cast<NodeId>((u + j) % n);
        far_end[u * half + j - 1] = v;
        adjacency[u].insert(v);
        adjacency[v].insert(static_cast<NodeId>(u));
      }
    }
    if (rewire_prob > 0.0) {
      for (std::size_t j = 1; j <= half; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
          if (engine.uniform() >= rewire_prob) continue;
          if (adjacency[u].size() >= n - 1) continue;
          NodeId w;
          do {
            w = static_cast<NodeId>(engine.below(n));
          } while (w == u || adjacency[u].contains(w));
          NodeId& v = far_end[u * half + j - 1];
          adjacency[u].erase(v);
          adjacency[v].erase(static_cast<NodeId>(u));
          adjacency[u].insert(w);
          adjacency[w].insert(static_cast<NodeId>(u));
          v = w;
        }
      }
    }
    std::vector<Edge> edges;
    edges.reserve(far_end.size());
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t j = 0; j < half; ++j) edges.emplace_back(static_cast<NodeId>(u), far_end[u * half + j]);
    }
    Graph g = Graph::from_edges(n, edges);
    if (is_connected(g)) return g;
  }
  throw ConfigError("could not generate a connected small-world graph in " + std::to_string(kMaxAttempts) +
                    " attempts; raise k or lower the rewiring probability");
}

Graph generate_from_histogram(const DegreeHistogram& histogram, std::uint64_t seed) {
  std::vector<std::size_t> degrees;
  for (const auto& [degree, count] : histogram) {
    if (degree == 0 && count > 0) throw ConfigError("degree 0 is not allowed: every agent needs a neighbour");
    degrees.insert(degrees.end(), count, degree);
  }
  const std::size_t n = degrees.size();
  if (n == 0) throw ConfigError("degree histogram is empty");
  const std::size_t stub_total = std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
  if (stub_total % 2 != 0) throw ConfigError("degree sum " + std::to_string(stub_total) + " is odd");
  if (histogram.rbegin()->first >= n) throw ConfigError("maximum degree must be below the node count");
  {
    std::vector<std::size_t> desc(degrees.rbegin(), degrees.rend());
    if (!is_graphical(desc)) throw ConfigError("degree histogram is not realizable as a simple graph");
  }

  rng::SequentialEngine engine(seed, rng::Stream::GraphConstruction);
  // Decouple node ids from degree.
  rng::shuffle(std::span(degrees), engine);

  std::vector<NodeId> stubs;
  stubs.reserve(stub_total);
  for (std::size_t u = 0; u < n; ++u) stubs.insert(stubs.end(), degrees[u], static_cast<NodeId>(u));
  rng::shuffle(std::span(stubs), engine);

  std::vector<Edge> edges;
  edges.reserve(stub_total / 2);
  MultiEdgeCounter counter;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    edges.emplace_back(stubs[i], stubs[i + 1]);
    counter.add(stubs[i], stubs[i + 1]);
  }

  std::vector<std::size_t> pending;
  {
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto [a, b] = edges[i];
      if (a == b || !seen.insert(edge_key(a, b)).second) pending.push_back(i);
    }
  }

  const std::size_t m = edges.size();
  const std::size_t max_attempts = 100 * m;
  std::size_t attempts = 0;
  while (!pending.empty()) {
    const std::size_t bad = pending.back();
    auto [u, v] = edges[bad];
    if (!counter.defective(u, v)) {
      pending.pop_back();
      continue;
    }
    if (++attempts > max_attempts) {
      throw ConfigError("configuration-model repair did not converge within " + std::to_string(max_attempts) +
                        " swap attempts");
    }
    const auto other = static_cast<std::size_t>(engine.below(m));
    if (other == bad) continue;
    auto [x, y] = edges[other];
    if (engine() & 1u) std::swap(x, y);

    // Defect delta of replacing {u-v, x-y} by {u-x, v-y}.
    auto removal = [&](NodeId a, NodeId b) { return (a == b || counter.count(a, b) > 1) ? -1 : 0; };
    int delta = removal(u, v);
    counter.remove(u, v);
    delta += removal(x, y);
    counter.remove(x, y);
    delta += (u == x || counter.count(u, x) > 0) ? 1 : 0;
    counter.add(u, x);
    delta += (v == y || counter.count(v, y) > 0) ? 1 : 0;
    counter.add(v, y);
    if (delta < 0) {
      edges[bad] = {u, x};
      edges[other] = {v, y};
      if (counter.defective(u, x)) pending.push_back(bad);
      if (counter.defective(v, y)) pending.push_back(other);
    } else {
      counter.remove(u, x);
      counter.remove(v, y);
      counter.add(u, v);
      counter.add(x, y);
    }
  }
  return Graph::from_edges(n, edges);
}

Graph read_edge_list(std::istream& in, const std::string& source_name) {
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  std::size_t declared_nodes = 0;
  std::size_t max_id_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;

  auto parse_id = [&](std::string_view token) -> NodeId {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc::result_out_of_range || (ec == std::errc{} && value > std::numeric_limits<NodeId>::max() - 1)) {
      throw ParseError(source_name, line_no, "node id out of range: '" + std::string(token) + "'");
    }
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError(source_name, line_no, "expected a non-negative integer node id, got '" + std::string(token) + "'");
    }
    if (declared_nodes != 0 && value >= declared_nodes) {
      throw ParseError(source_name, line_no,
                       "node id " + std::to_string(value) + " out of range for " + std::to_string(declared_nodes) + " nodes");
    }
    return static_cast<NodeId>(value);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first, second, extra;
    if (!(fields >> first)) continue;
    if (first.starts_with('#')) {
      // Optional header written by write_edge_list: "# nodes N edges M".
      std::istringstream header(line.substr(1));
      std::string tag;
      std::size_t value = 0;
      if (header >> tag >> value && tag == "nodes" && edges.empty()) declared_nodes = value;
      continue;
    }
    if (!(fields >> second) || (fields >> extra)) {
      throw ParseError(source_name, line_no, "expected exactly two node ids per line");
    }
    const NodeId a = parse_id(first);
    const NodeId b = parse_id(second);
    if (a == b) throw ParseError(source_name, line_no, "self-loop on node " + std::to_string(a));
    if (!seen.insert(edge_key(a, b)).second) {
      throw ParseError(source_name, line_no, "duplicate edge " + std::to_string(a) + " " + std::to_string(b));
    }
    edges.emplace_back(a, b);
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::size_t{std::max(a, b)} + 1);
  }
  const std::size_t n = declared_nodes != 0 ? declared_nodes : max_id_plus_one;
  if (n == 0) throw ConfigError(source_name + ": edge list contains no edges");
  return Graph::from_edges(n, edges);
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list '" + path.string() + "'");
  return read_edge_list(in, path.string());
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "# nodes " << graph.node_count() << " edges " << graph.edge_count() << '\n';
  for (const auto& [a, b] : graph.edges()) out << a << ' ' << b << '\n';
}

void save_edge_list(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list '" + path.string() + "'");
  write_edge_list(graph, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::pair<std::size_t, double>> DegreeRank::cumulative_thresholds() const {
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) out.emplace_back(classes[i].degree, threshold(i));
  return out;
}

DegreeRank degree_rank(const Graph& graph, RankOrder order, std::uint64_t tie_seed) {
  const std::size_t n = graph.node_count();
  DegreeRank rank;
  rank.order = order;
  rank.node_count = n;

  std::map<std::size_t, std::vector<NodeId>> by_degree;
  for (NodeId u = 0; u < n; ++u) by_degree[graph.degree(u)].push_back(u);

  rank.ranked_nodes.reserve(n);
  auto append_class = [&](std::size_t degree, std::vector<NodeId>& members) {
    // Each class draws from its own substream so one class's size does not
    // perturb another's shuffle.
    rng::SequentialEngine engine(tie_seed, rng::Stream::TieShuffle, static_cast<std::uint32_t>(degree));
    rng::shuffle(std::span(members), engine);
    rank.ranked_nodes.insert(rank.ranked_nodes.end(), members.begin(), members.end());
    rank.classes.push_back({degree, members.size(), rank.ranked_nodes.size()});
  };
  if (order == RankOrder::HighestFirst) {
    for (auto it = by_degree.rbegin(); it != by_degree.rend(); ++it) append_class(it->first, it->second);
  } else {
    for (auto& [degree, members] : by_degree) append_class(degree, members);
  }
  return rank;
}

}  // namespace evac
