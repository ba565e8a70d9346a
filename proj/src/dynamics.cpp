#include "evac/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "evac/digest.hpp"
#include "evac/error.hpp"
#include "evac/rng.hpp"

namespace evac {

namespace {

inline double node_payoff(const PayoffMatrix& m, Decision own, std::size_t evacuating, std::size_t degree) noexcept {
  const double vs_evacuee = m.coefficient(own, Decision::Evacuate);
  const double vs_stayer = m.coefficient(own, Decision::Stay);
  return (static_cast<double>(evacuating) * vs_evacuee + static_cast<double>(degree - evacuating) * vs_stayer) *
         m.property_value;
}

struct StepInputs {
  const Graph& graph;
  std::span<const Decision> prev;
  std::span<const double> w;
  double w_max;
  double w_min;
  rng::CounterRng stream;
  std::uint32_t t;
  NeighborSampling sampling;
};

// Decision of agent i at step t. Every draw is keyed by (i, t, k), so the
// result does not depend on the order in which agents are visited.
Decision next_decision(const StepInputs& in, NodeId i, std::vector<NodeId>& scratch) {
  const Decision own = in.prev[i];
  const auto adj = in.graph.neighbors(i);
  const double w_i = in.w[i];

  if (in.sampling == NeighborSampling::OneRandomNeighbor) {
    const auto block = in.stream.draw(i, in.t, 0);
    const NodeId j = adj[rng::scale(rng::join(block[0], block[1]), adj.size())];
    if (in.prev[j] == own) return own;
    const double prob = imitation_probability(w_i, in.w[j], in.w_max, in.w_min);
    return rng::to_unit(block[2], block[3]) < prob ? in.prev[j] : own;
  }

  scratch.assign(adj.begin(), adj.end());
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    const auto block = in.stream.draw(i, in.t, static_cast<std::uint32_t>(k));
    const std::size_t pick = k + rng::scale(rng::join(block[0], block[1]), scratch.size() - k);
    std::swap(scratch[k], scratch[pick]);
    const NodeId j = scratch[k];
    const double prob = imitation_probability(w_i, in.w[j], in.w_max, in.w_min);
    if (rng::to_unit(block[2], block[3]) < prob) return in.prev[j];
  }
  return own;
}

std::pair<double, double> payoff_range(std::span<const double> w) {
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return {*hi, *lo};
}

void check_inputs(const Graph& graph, std::span<const Decision> initial, std::span<const char> pinned) {
  if (initial.size() != graph.node_count()) {
    throw ConfigError("decision vector has " + std::to_string(initial.size()) + " entries for a graph of " +
                      std::to_string(graph.node_count()) + " nodes");
  }
  if (!pinned.empty() && pinned.size() != graph.node_count()) throw ConfigError("pin mask size mismatch");
}

// Incremental simulator. Keeps, per agent, the number of evacuating
// neighbours so payoffs are refreshed in O(n + switched edges) per step.
class Engine {
 public:
  Engine(const Graph& graph, std::span<const Decision> initial, const SimulationConfig& config,
         std::span<const char> pinned)
      : graph_(graph),
        config_(config),
        pinned_(pinned),
        stream_(config.seed, rng::Stream::Imitation),
        decisions_(initial.begin(), initial.end()),
        next_(decisions_.size()),
        evacuating_neighbors_(decisions_.size(), 0),
        w_(decisions_.size(), 0.0) {
    for (NodeId i = 0; i < graph_.node_count(); ++i) {
      if (decisions_[i] == Decision::Evacuate) {
        ++evacuees_;
        for (NodeId j : graph_.neighbors(i)) ++evacuating_neighbors_[j];
      }
    }
    refresh_payoffs();
  }

  std::span<const Decision> decisions() const noexcept { return decisions_; }
  std::span<const double> payoffs() const noexcept { return w_; }
  std::size_t evacuees() const noexcept { return evacuees_; }
  bool uniform() const noexcept { return evacuees_ == 0 || evacuees_ == decisions_.size(); }

  // Moves from t-1 to t. Returns false when nothing changed.
  bool advance(std::uint32_t t) {
    if (uniform()) return false;
    const auto [w_max, w_min] = payoff_range(w_);
    if (!(w_max > w_min)) return false;

    const StepInputs in{graph_, decisions_, w_, w_max, w_min, stream_, t, config_.neighbor_sampling};
    const std::size_t n = decisions_.size();
    switched_.clear();
    for (NodeId i = 0; i < n; ++i) {
      const Decision own = decisions_[i];
      next_[i] = own;
      if (!pinned_.empty() && pinned_[i]) continue;
      const std::size_t same = own == Decision::Evacuate ? evacuating_neighbors_[i]
                                                         : graph_.degree(i) - evacuating_neighbors_[i];
      if (same == graph_.degree(i)) continue;
      next_[i] = next_decision(in, i, scratch_);
      if (next_[i] != own) switched_.push_back(i);
    }
    if (switched_.empty()) return false;

    for (NodeId i : switched_) {
      const bool now_evacuating = next_[i] == Decision::Evacuate;
      if (now_evacuating) {
        ++evacuees_;
        for (NodeId j : graph_.neighbors(i)) ++evacuating_neighbors_[j];
      } else {
        --evacuees_;
        for (NodeId j : graph_.neighbors(i)) --evacuating_neighbors_[j];
      }
    }
    decisions_.swap(next_);
    refresh_payoffs();
    return true;
  }

 private:
  void refresh_payoffs() {
    for (NodeId i = 0; i < decisions_.size(); ++i) {
      w_[i] = node_payoff(config_.matrix, decisions_[i], evacuating_neighbors_[i], graph_.degree(i));
    }
  }

  const Graph& graph_;
  const SimulationConfig& config_;
  std::span<const char> pinned_;
  rng::CounterRng stream_;
  DecisionVector decisions_;
  DecisionVector next_;
  std::vector<std::uint32_t> evacuating_neighbors_;
  std::vector<double> w_;
  std::vector<NodeId> switched_;
  std::vector<NodeId> scratch_;
  std::size_t evacuees_ = 0;
};

}  // namespace

NeighborSampling neighbor_sampling_from_string(std::string_view text) {
  if (text == "one-random" || text == "one-random-neighbor") return NeighborSampling::OneRandomNeighbor;
  if (text == "each-sequential" || text == "each-neighbor-sequential") return NeighborSampling::EachNeighborSequential;
  throw ConfigError("unknown neighbor_sampling '" + std::string(text) + "' (expected one-random or each-sequential)");
}

std::string_view to_string(NeighborSampling s) noexcept {
  return s == NeighborSampling::OneRandomNeighbor ? "one-random" : "each-sequential";
}

void SimulationConfig::validate() const {
  if (timesteps < 1) throw ConfigError("timesteps must be >= 1");
  if (timesteps >= std::numeric_limits<std::uint32_t>::max()) throw ConfigError("timesteps too large");
  if (!(matrix.property_value > 0.0)) throw ConfigError("property_value must be positive");
}

std::uint64_t SimulationConfig::digest() const {
  Digest d;
  d.text("dynamics/v1").u64(timesteps).u64(seed);
  for (double c : {matrix.a_ee, matrix.b_ee, matrix.a_es, matrix.b_es, matrix.a_se, matrix.b_se, matrix.a_ss,
                   matrix.b_ss, matrix.property_value}) {
    d.real(c);
  }
  d.text(to_string(neighbor_sampling)).u64(pin_priority ? 1 : 0);
  return d.value();
}

std::vector<double> accumulate_payoffs(const Graph& graph, std::span<const Decision> decisions,
                                       const PayoffMatrix& matrix) {
  check_inputs(graph, decisions, {});
  std::vector<double> w(graph.node_count());
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    std::size_t evacuating = 0;
    for (NodeId j : graph.neighbors(i)) evacuating += decisions[j] == Decision::Evacuate ? 1 : 0;
    w[i] = node_payoff(matrix, decisions[i], evacuating, graph.degree(i));
  }
  return w;
}

double imitation_probability(double w_i, double w_j, double w_max, double w_min) noexcept {
  const double range = w_max - w_min;
  if (!(range > 0.0)) return 0.0;
  const double p = (w_j - w_i) / range;
  if (!(p > 0.0)) return 0.0;
  return p < 1.0 ? p : 1.0;
}

DecisionVector step(const Graph& graph, const SimulationState& state, const SimulationConfig& config,
                    std::span<const char> pinned) {
  check_inputs(graph, state.decisions, pinned);
  if (state.total_payoffs.size() != graph.node_count()) throw ConfigError("payoff vector size mismatch");
  DecisionVector next = state.decisions;
  const auto [w_max, w_min] = payoff_range(state.total_payoffs);
  if (!(w_max > w_min)) return next;

  const StepInputs in{graph,
                      state.decisions,
                      state.total_payoffs,
                      w_max,
                      w_min,
                      rng::CounterRng(config.seed, rng::Stream::Imitation),
                      static_cast<std::uint32_t>(state.t + 1),
                      config.neighbor_sampling};
  std::vector<NodeId> scratch;
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    if (!pinned.empty() && pinned[i]) continue;
    next[i] = next_decision(in, i, scratch);
  }
  return next;
}

Trajectory::Trajectory(std::size_t node_count, std::size_t timesteps)
    : node_count_(node_count),
      timesteps_(timesteps),
      words_per_frame_((node_count + 63) / 64),
      bits_((timesteps + 1) * words_per_frame_, 0),
      evacuees_(timesteps + 1, 0) {}

DecisionVector Trajectory::frame(std::size_t t) const {
  DecisionVector out(node_count_);
  for (NodeId i = 0; i < node_count_; ++i) out[i] = at(t, i);
  return out;
}

void Trajectory::set_frame(std::size_t t, std::span<const Decision> decisions) {
  auto words = frame_words(t);
  std::fill(words.begin(), words.end(), 0);
  std::uint32_t count = 0;
  for (std::size_t i = 0; i < node_count_; ++i) {
    if (decisions[i] == Decision::Evacuate) {
      words[i / 64] |= std::uint64_t{1} << (i % 64);
      ++count;
    }
  }
  evacuees_[t] = count;
}

void Trajectory::set_payoffs(std::size_t t, std::span<const double> w) {
  if (payoffs_.empty()) payoffs_.assign(frame_count() * node_count_, 0.0);
  std::copy(w.begin(), w.end(), payoffs_.begin() + static_cast<std::ptrdiff_t>(t * node_count_));
}

void Trajectory::recount() {
  for (std::size_t t = 0; t < frame_count(); ++t) {
    std::uint32_t count = 0;
    for (std::uint64_t word : frame_words(t)) count += static_cast<std::uint32_t>(std::popcount(word));
    evacuees_[t] = count;
  }
}

std::vector<char> pin_mask(std::size_t node_count, std::span<const NodeId> pinned_nodes) {
  std::vector<char> mask(node_count, 0);
  for (NodeId node : pinned_nodes) {
    if (node >= node_count) throw ConfigError("pinned node out of range");
    mask[node] = 1;
  }
  return mask;
}

Trajectory run(const Graph& graph, std::span<const Decision> initial, const SimulationConfig& config,
               std::span<const char> pinned) {
  config.validate();
  check_inputs(graph, initial, pinned);
  Trajectory trajectory(graph.node_count(), config.timesteps);
  trajectory.seed = config.seed;
  trajectory.config_digest = config.digest();

  Engine engine(graph, initial, config, pinned);
  trajectory.set_frame(0, engine.decisions());
  if (config.record_payoffs) trajectory.set_payoffs(0, engine.payoffs());
  for (std::size_t t = 1; t <= config.timesteps; ++t) {
    if (engine.advance(static_cast<std::uint32_t>(t))) {
      trajectory.set_frame(t, engine.decisions());
    } else {
      const auto prev = trajectory.frame_words(t - 1);
      std::copy(prev.begin(), prev.end(), trajectory.frame_words(t).begin());
    }
    if (config.record_payoffs) trajectory.set_payoffs(t, engine.payoffs());
  }
  trajectory.recount();
  return trajectory;
}

std::vector<std::uint32_t> run_evacuee_counts(const Graph& graph, std::span<const Decision> initial,
                                              const SimulationConfig& config, std::span<const char> pinned) {
  config.validate();
  check_inputs(graph, initial, pinned);
  Engine engine(graph, initial, config, pinned);
  std::vector<std::uint32_t> counts(config.timesteps + 1);
  counts[0] = static_cast<std::uint32_t>(engine.evacuees());
  for (std::size_t t = 1; t <= config.timesteps; ++t) {
    engine.advance(static_cast<std::uint32_t>(t));
    counts[t] = static_cast<std::uint32_t>(engine.evacuees());
  }
  return counts;
}

}  // namespace evac
