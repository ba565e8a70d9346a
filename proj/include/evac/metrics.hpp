#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "evac/dynamics.hpp"
#include "evac/network.hpp"

namespace evac {

using RateSeries = std::vector<double>;

double evacuation_rate(std::span<const Decision> decisions);

RateSeries rate_series(const Trajectory& trajectory);
RateSeries rate_series(std::span<const std::uint32_t> evacuee_counts, std::size_t node_count);

// Mean of the last `window` entries of a series covering timesteps 0..T.
// window must lie in [1, T]; with window == T the t = 0 entry is excluded.
double final_rate(std::span<const double> series, std::size_t window = 1000);
double final_rate(const Trajectory& trajectory, std::size_t window = 1000);

struct RunAggregate {
  double mean = 0.0;
  // Sample standard deviation (n - 1 denominator); 0 for a single run.
  double sd = 0.0;
  std::size_t runs = 0;
};

RunAggregate aggregate_runs(std::span<const double> rates);

struct SwitchCounts {
  // degree -> switches at each timestep; index t covers the change t-1 -> t,
  // index 0 is always zero.
  std::map<std::size_t, std::vector<std::uint64_t>> per_step;
  std::map<std::size_t, std::uint64_t> totals;
  std::uint64_t total = 0;
};

SwitchCounts switch_counts_by_degree(const Trajectory& trajectory, const Graph& graph);

// Decisions over time with rows in degree-rank order (highest degree first).
struct DecisionHeatmap {
  std::vector<NodeId> row_nodes;
  std::vector<std::size_t> row_degrees;
  std::size_t columns = 0;
  std::vector<Decision> cells;  // row-major

  std::size_t rows() const noexcept { return row_nodes.size(); }
  Decision at(std::size_t row, std::size_t column) const noexcept { return cells[row * columns + column]; }
};

// `rank` must be a HighestFirst rank of the trajectory's graph; its tie order
// fixes the row order.
DecisionHeatmap decision_heatmap(const Trajectory& trajectory, const Graph& graph, const DegreeRank& rank);

struct ContributionRow {
  std::size_t degree = 0;
  std::size_t count = 0;
  double population_pct = 0.0;
  // Percentage points, one entry per theta.
  std::vector<double> rate_change;
  std::vector<double> rate_change_per_agent;
};

struct ContributionTable {
  std::vector<double> thetas;
  std::size_t node_count = 0;
  std::vector<double> start_pct;  // rate at gamma = 0, per theta
  std::vector<ContributionRow> rows;
  std::vector<double> end_pct;  // rate once every class is included, per theta

  // start + sum of changes == end for every theta, within tol.
  bool telescopes(double tol = 1e-9) const;
};

// rates[θ index][k] is the mean final rate (fraction) at gamma = 0 for k = 0
// and at rank.threshold(k - 1) for k = 1..classes.
ContributionTable degree_contribution(const DegreeRank& rank, std::span<const double> thetas,
                                      const std::vector<std::vector<double>>& rates);

void write_rate_series_csv(std::span<const double> series, std::ostream& out);
void write_switch_counts_csv(const SwitchCounts& counts, std::ostream& out);
// Dense E/S grid, one row per agent in heatmap order. stride > 1 keeps every
// stride-th timestep column (plus the last).
void write_heatmap_csv(const DecisionHeatmap& heatmap, std::ostream& out, std::size_t stride = 1);
// Per-agent columns are printed at two decimals; rate changes in full.
void write_contribution_csv(const ContributionTable& table, std::ostream& out);

}  // namespace evac
