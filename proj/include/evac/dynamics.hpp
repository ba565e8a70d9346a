#pragma once

// Synchronous imitation dynamics.
//
// At each timestep every agent i compares its total payoff w_i (summed over
// all neighbour interactions at t-1) with a neighbour j and adopts j's t-1
// decision with probability
//
//     max(0, (w_j - w_i) / (max_k w_k - min_k w_k)),
//
// where the range is taken over all agents. A zero range means no imitation.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evac/network.hpp"
#include "evac/payoff.hpp"
#include "evac/scenario.hpp"

namespace evac {

enum class NeighborSampling {
  // One uniformly drawn neighbour per agent per step.
  OneRandomNeighbor,
  // Neighbours visited in a random order; stop at the first adoption.
  EachNeighborSequential,
};

NeighborSampling neighbor_sampling_from_string(std::string_view text);
std::string_view to_string(NeighborSampling s) noexcept;

struct SimulationConfig {
  std::size_t timesteps = 3000;
  std::uint64_t seed = 0;
  PayoffMatrix matrix = paper_coefficient_matrix(0.0);
  NeighborSampling neighbor_sampling = NeighborSampling::OneRandomNeighbor;
  // Priority agents keep their initial decision for the whole run.
  bool pin_priority = false;
  // Keep per-step payoff vectors in the trajectory (8 bytes per agent per step).
  bool record_payoffs = false;

  void validate() const;
  std::uint64_t digest() const;
};

struct SimulationState {
  std::size_t t = 0;
  DecisionVector decisions;
  std::vector<double> total_payoffs;
};

// w_i = sum over neighbours j of the A-side payoff for (decisions[i], decisions[j]).
std::vector<double> accumulate_payoffs(const Graph& graph, std::span<const Decision> decisions,
                                       const PayoffMatrix& matrix);

double imitation_probability(double w_i, double w_j, double w_max, double w_min) noexcept;

// Decisions at state.t + 1. `pinned` is empty or one flag per agent.
DecisionVector step(const Graph& graph, const SimulationState& state, const SimulationConfig& config,
                    std::span<const char> pinned = {});

// Full decision history, bit-packed: one frame per timestep 0..timesteps.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t node_count, std::size_t timesteps);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t timesteps() const noexcept { return timesteps_; }
  std::size_t frame_count() const noexcept { return timesteps_ + 1; }
  std::size_t words_per_frame() const noexcept { return words_per_frame_; }

  Decision at(std::size_t t, NodeId node) const noexcept {
    const std::uint64_t word = bits_[t * words_per_frame_ + node / 64];
    return ((word >> (node % 64)) & 1u) ? Decision::Evacuate : Decision::Stay;
  }
  DecisionVector frame(std::size_t t) const;
  void set_frame(std::size_t t, std::span<const Decision> decisions);
  std::span<const std::uint64_t> frame_words(std::size_t t) const noexcept {
    return {bits_.data() + t * words_per_frame_, words_per_frame_};
  }
  std::span<std::uint64_t> frame_words(std::size_t t) noexcept {
    return {bits_.data() + t * words_per_frame_, words_per_frame_};
  }
  std::size_t evacuees(std::size_t t) const noexcept { return evacuees_[t]; }

  bool has_payoffs() const noexcept { return !payoffs_.empty(); }
  std::span<const double> payoffs(std::size_t t) const noexcept {
    return {payoffs_.data() + t * node_count_, node_count_};
  }
  void set_payoffs(std::size_t t, std::span<const double> w);

  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;

  // Recomputes per-frame evacuee counts from the bit frames.
  void recount();

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::size_t node_count_ = 0;
  std::size_t timesteps_ = 0;
  std::size_t words_per_frame_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> evacuees_;
  std::vector<double> payoffs_;
};

std::vector<char> pin_mask(std::size_t node_count, std::span<const NodeId> pinned_nodes);

Trajectory run(const Graph& graph, std::span<const Decision> initial, const SimulationConfig& config,
               std::span<const char> pinned = {});

// Number of evacuating agents at each timestep 0..timesteps. Same dynamics as
// run() without keeping the decision history.
std::vector<std::uint32_t> run_evacuee_counts(const Graph& graph, std::span<const Decision> initial,
                                              const SimulationConfig& config, std::span<const char> pinned = {});

}  // namespace evac
