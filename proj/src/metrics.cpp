#include "evac/metrics.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <string>

#include "evac/error.hpp"
#include "evac/format.hpp"

namespace evac {

double evacuation_rate(std::span<const Decision> decisions) {
  if (decisions.empty()) throw ConfigError("evacuation rate of an empty population");
  std::size_t evacuating = 0;
  for (Decision d : decisions) evacuating += d == Decision::Evacuate ? 1 : 0;
  return static_cast<double>(evacuating) / static_cast<double>(decisions.size());
}

RateSeries rate_series(std::span<const std::uint32_t> evacuee_counts, std::size_t node_count) {
  RateSeries series(evacuee_counts.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    series[t] = static_cast<double>(evacuee_counts[t]) / static_cast<double>(node_count);
  }
  return series;
}

RateSeries rate_series(const Trajectory& trajectory) {
  RateSeries series(trajectory.frame_count());
  for (std::size_t t = 0; t < series.size(); ++t) {
    series[t] = static_cast<double>(trajectory.evacuees(t)) / static_cast<double>(trajectory.node_count());
  }
  return series;
}

double final_rate(std::span<const double> series, std::size_t window) {
  if (series.empty()) throw ConfigError("empty rate series");
  const std::size_t timesteps = series.size() - 1;
  if (window == 0 || window > timesteps) {
    throw ConfigError("averaging window " + std::to_string(window) + " must lie in [1, " + std::to_string(timesteps) +
                      "]");
  }
  double sum = 0.0;
  for (std::size_t t = series.size() - window; t < series.size(); ++t) sum += series[t];
  return sum / static_cast<double>(window);
}

double final_rate(const Trajectory& trajectory, std::size_t window) {
  return final_rate(rate_series(trajectory), window);
}

RunAggregate aggregate_runs(std::span<const double> rates) {
  if (rates.empty()) throw ConfigError("cannot aggregate zero runs");
  RunAggregate agg;
  agg.runs = rates.size();
  double sum = 0.0;
  for (double r : rates) sum += r;
  agg.mean = sum / static_cast<double>(rates.size());
  if (rates.size() > 1) {
    double squares = 0.0;
    for (double r : rates) squares += (r - agg.mean) * (r - agg.mean);
    agg.sd = std::sqrt(squares / static_cast<double>(rates.size() - 1));
  }
  return agg;
}

SwitchCounts switch_counts_by_degree(const Trajectory& trajectory, const Graph& graph) {
  if (trajectory.node_count() != graph.node_count()) throw ConfigError("trajectory and graph sizes differ");
  if (trajectory.frame_count() < 1) throw ConfigError("trajectory has no decision history");
  SwitchCounts counts;
  for (const auto& [degree, nodes] : degree_histogram(graph)) {
    counts.per_step[degree].assign(trajectory.frame_count(), 0);
    counts.totals[degree] = 0;
  }
  for (std::size_t t = 1; t < trajectory.frame_count(); ++t) {
    const auto before = trajectory.frame_words(t - 1);
    const auto after = trajectory.frame_words(t);
    for (std::size_t w = 0; w < before.size(); ++w) {
      std::uint64_t diff = before[w] ^ after[w];
      while (diff != 0) {
        const auto node = static_cast<NodeId>(w * 64 + static_cast<std::size_t>(std::countr_zero(diff)));
        diff &= diff - 1;
        const std::size_t degree = graph.degree(node);
        ++counts.per_step[degree][t];
        ++counts.totals[degree];
        ++counts.total;
      }
    }
  }
  return counts;
}

DecisionHeatmap decision_heatmap(const Trajectory& trajectory, const Graph& graph, const DegreeRank& rank) {
  if (trajectory.node_count() != graph.node_count() || rank.node_count != graph.node_count()) {
    throw ConfigError("heatmap inputs cover different node counts");
  }
  if (rank.order != RankOrder::HighestFirst) throw ConfigError("heatmap rows are ordered highest degree first");
  DecisionHeatmap map;
  map.row_nodes = rank.ranked_nodes;
  map.columns = trajectory.frame_count();
  map.row_degrees.reserve(map.row_nodes.size());
  map.cells.resize(map.row_nodes.size() * map.columns);
  for (std::size_t row = 0; row < map.row_nodes.size(); ++row) {
    const NodeId node = map.row_nodes[row];
    map.row_degrees.push_back(graph.degree(node));
    for (std::size_t t = 0; t < map.columns; ++t) map.cells[row * map.columns + t] = trajectory.at(t, node);
  }
  return map;
}

bool ContributionTable::telescopes(double tol) const {
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    double sum = start_pct[k];
    for (const auto& row : rows) sum += row.rate_change[k];
    if (std::abs(sum - end_pct[k]) > tol) return false;
  }
  return true;
}

ContributionTable degree_contribution(const DegreeRank& rank, std::span<const double> thetas,
                                      const std::vector<std::vector<double>>& rates) {
  if (rates.size() != thetas.size()) {
    throw ConfigError("contribution input has " + std::to_string(rates.size()) + " rate columns for " +
                      std::to_string(thetas.size()) + " theta values");
  }
  const std::size_t expected = rank.classes.size() + 1;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    if (rates[k].size() != expected) {
      throw ConfigError("missing threshold rates for theta " + format_real(thetas[k]) + ": need " +
                        std::to_string(expected) + " (gamma = 0 plus each degree threshold), got " +
                        std::to_string(rates[k].size()));
    }
  }

  ContributionTable table;
  table.thetas.assign(thetas.begin(), thetas.end());
  table.node_count = rank.node_count;
  for (const auto& column : rates) {
    table.start_pct.push_back(column.front() * 100.0);
    table.end_pct.push_back(column.back() * 100.0);
  }
  for (std::size_t c = 0; c < rank.classes.size(); ++c) {
    ContributionRow row;
    row.degree = rank.classes[c].degree;
    row.count = rank.classes[c].count;
    row.population_pct = 100.0 * static_cast<double>(row.count) / static_cast<double>(rank.node_count);
    for (const auto& column : rates) {
      const double change = (column[c + 1] - column[c]) * 100.0;
      row.rate_change.push_back(change);
      row.rate_change_per_agent.push_back(change / static_cast<double>(row.count));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_rate_series_csv(std::span<const double> series, std::ostream& out) {
  out << "t,rate\n";
  for (std::size_t t = 0; t < series.size(); ++t) out << t << ',' << format_real(series[t]) << '\n';
}

void write_switch_counts_csv(const SwitchCounts& counts, std::ostream& out) {
  out << "degree,t,count\n";
  for (auto it = counts.per_step.rbegin(); it != counts.per_step.rend(); ++it) {
    for (std::size_t t = 1; t < it->second.size(); ++t) out << it->first << ',' << t << ',' << it->second[t] << '\n';
  }
}

void write_heatmap_csv(const DecisionHeatmap& heatmap, std::ostream& out, std::size_t stride) {
  if (stride == 0) throw ConfigError("heatmap stride must be >= 1");
  std::vector<std::size_t> columns;
  for (std::size_t t = 0; t < heatmap.columns; t += stride) columns.push_back(t);
  if (heatmap.columns > 0 && columns.back() != heatmap.columns - 1) columns.push_back(heatmap.columns - 1);

  out << "node,degree";
  for (std::size_t t : columns) out << ",t" << t;
  out << '\n';
  std::string line;
  for (std::size_t row = 0; row < heatmap.rows(); ++row) {
    line = std::to_string(heatmap.row_nodes[row]) + ',' + std::to_string(heatmap.row_degrees[row]);
    for (std::size_t t : columns) {
      line += ',';
      line += to_char(heatmap.at(row, t));
    }
    out << line << '\n';
  }
}

void write_contribution_csv(const ContributionTable& table, std::ostream& out) {
  out << "degree,population_pct";
  for (double theta : table.thetas) out << ",rate_change_" << format_real(theta);
  for (double theta : table.thetas) out << ",per_agent_" << format_real(theta);
  out << '\n';
  out << "start,";
  for (double v : table.start_pct) out << ',' << format_real(v);
  for (std::size_t k = 0; k < table.thetas.size(); ++k) out << ",";
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.degree << ',' << format_fixed(row.population_pct, 2);
    for (double v : row.rate_change) out << ',' << format_real(v);
    for (double v : row.rate_change_per_agent) out << ',' << format_fixed(v, 2);
    out << '\n';
  }
  out << "total,";
  for (double v : table.end_pct) out << ',' << format_real(v);
  for (std::size_t k = 0; k < table.thetas.size(); ++k) out << ",";
  out << '\n';
}

}  // namespace evac
