#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "evac/dynamics.hpp"
#include "evac/metrics.hpp"
#include "evac/network.hpp"
#include "evac/payoff.hpp"
#include "evac/scenario.hpp"

namespace evac {

struct SweepGrid {
  std::vector<Variant> variants{Variant::RandomisedHighest};
  std::vector<double> thetas{-0.10, 0.0, 0.10, 0.20};
  std::vector<double> gammas;
  std::size_t runs = 5;
  std::uint64_t master_seed = 1;

  void validate() const;
};

// gammas 0, step, 2*step, ..., 1 (values snapped to 1e-9).
std::vector<double> gamma_range(double step);

// Adds every cumulative degree threshold of the ranks the variants use, then
// sorts and removes duplicates.
std::vector<double> with_degree_thresholds(std::vector<double> gammas, const Graph& graph,
                                           const std::vector<Variant>& variants);

// Everything about a cell except its grid coordinates.
struct SweepSettings {
  PayoffMode payoff_mode = PayoffMode::Paper;
  PayoffParams payoff;  // theta is overridden per cell
  std::size_t timesteps = 3000;
  std::size_t window = 1000;
  NeighborSampling neighbor_sampling = NeighborSampling::OneRandomNeighbor;
  bool pin_priority = false;
  double random_stay_prob = 0.5;

  void validate() const;
};

struct CellKey {
  Variant variant = Variant::RandomisedHighest;
  double theta = 0.0;
  double gamma = 0.0;
  std::size_t run = 0;

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellRecord {
  CellKey key;
  std::uint64_t seed = 0;
  double final_rate = 0.0;
};

struct CellAggregate {
  Variant variant = Variant::RandomisedHighest;
  double theta = 0.0;
  double gamma = 0.0;
  RunAggregate stats;
};

struct SweepResult {
  std::uint64_t config_digest = 0;
  // Canonical order: variant, theta, gamma (grid order), run.
  std::vector<CellRecord> records;
  std::vector<CellAggregate> aggregates;

  const CellAggregate* find(Variant variant, double theta, double gamma) const;
};

struct SweepOptions {
  std::size_t workers = 1;
  // Append-only journal of completed cells; empty disables persistence.
  std::filesystem::path journal;
  // Reuse cells already in the journal (refuses on digest mismatch).
  bool resume = false;
};

std::uint64_t cell_seed(std::uint64_t master_seed, const CellKey& key);

// Digest of graph + settings + master seed. Grid axes are excluded so cells
// stay reusable when the grid grows.
std::uint64_t sweep_digest(const Graph& graph, const SweepSettings& settings, std::uint64_t master_seed);

// One cell: degree rank with seeded ties, initial decisions, run, final rate.
double run_cell(const Graph& graph, const SweepSettings& settings, const CellKey& key, std::uint64_t seed);

SweepResult run_sweep(const Graph& graph, const SweepGrid& grid, const SweepSettings& settings,
                      const SweepOptions& options = {});

// Raw per-run final rates for each gamma (outer index follows `gammas`).
std::vector<std::vector<double>> threshold_experiment(const Graph& graph, const SweepSettings& settings,
                                                      double theta, Variant variant,
                                                      const std::vector<double>& gammas, std::size_t repeats,
                                                      std::uint64_t master_seed, std::size_t workers = 1);

// Contribution table from a sweep that covers gamma = 0 and every threshold
// of `rank` for the given variant.
ContributionTable contribution_from_sweep(const SweepResult& result, const DegreeRank& rank, Variant variant,
                                          const std::vector<double>& thetas);

void write_records_csv(const SweepResult& result, std::ostream& out);
void write_aggregates_csv(const SweepResult& result, std::ostream& out);
// theta,gamma,mean_rate,sd for one variant.
void write_figure_csv(const SweepResult& result, Variant variant, std::ostream& out);
std::string summary_json(const SweepResult& result, const SweepGrid& grid, const SweepSettings& settings,
                         std::uint64_t graph_fingerprint);

}  // namespace evac
