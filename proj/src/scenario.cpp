#include "evac/scenario.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "evac/error.hpp"
#include "evac/rng.hpp"

namespace evac {

Variant variant_from_string(std::string_view text) {
  if (text == "randomised-highest" || text == "randomized-highest") return Variant::RandomisedHighest;
  if (text == "fixed-highest") return Variant::FixedHighest;
  if (text == "randomised-lowest" || text == "randomized-lowest") return Variant::RandomisedLowest;
  if (text == "fixed-lowest") return Variant::FixedLowest;
  throw ConfigError("unknown scenario variant '" + std::string(text) +
                    "' (expected randomised-highest, fixed-highest, randomised-lowest, fixed-lowest)");
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::RandomisedHighest:
      return "randomised-highest";
    case Variant::FixedHighest:
      return "fixed-highest";
    case Variant::RandomisedLowest:
      return "randomised-lowest";
    case Variant::FixedLowest:
      return "fixed-lowest";
  }
  return "?";
}

RankOrder rank_order_for(Variant v) noexcept {
  return (v == Variant::RandomisedHighest || v == Variant::FixedHighest) ? RankOrder::HighestFirst
                                                                          : RankOrder::LowestFirst;
}

bool is_randomised(Variant v) noexcept {
  return v == Variant::RandomisedHighest || v == Variant::RandomisedLowest;
}

void ScenarioSpec::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1], got " + std::to_string(gamma));
  if (!(random_stay_prob >= 0.0 && random_stay_prob <= 1.0)) {
    throw ConfigError("random_stay_prob must lie in [0, 1]");
  }
}

std::size_t priority_count(double gamma, std::size_t node_count) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  // Snap products within 1e-9 of a half-integer or integer before rounding
  // so 0.5698 * 5000 does not land on either side of 2849 by representation.
  const double exact = gamma * static_cast<double>(node_count);
  const double snapped = std::round(exact * 2.0) / 2.0;
  const double value = std::abs(exact - snapped) < 1e-9 ? snapped : exact;
  return static_cast<std::size_t>(std::floor(value + 0.5));
}

std::vector<NodeId> priority_set(const DegreeRank& rank, double gamma) {
  const std::size_t count = priority_count(gamma, rank.node_count);
  return {rank.ranked_nodes.begin(), rank.ranked_nodes.begin() + static_cast<std::ptrdiff_t>(count)};
}

DecisionVector initialize_decisions(const Graph& graph, const DegreeRank& rank, const ScenarioSpec& spec) {
  spec.validate();
  const std::size_t n = graph.node_count();
  if (rank.node_count != n || rank.ranked_nodes.size() != n) {
    throw ConfigError("degree rank covers " + std::to_string(rank.node_count) + " nodes but graph has " +
                      std::to_string(n));
  }
  if (rank.order != rank_order_for(spec.variant)) {
    throw ConfigError("degree rank order does not match scenario variant " + std::string(to_string(spec.variant)));
  }

  DecisionVector decisions(n, Decision::Stay);
  if (is_randomised(spec.variant)) {
    const rng::CounterRng coin(spec.seed, rng::Stream::Initialization);
    for (NodeId i = 0; i < n; ++i) {
      const auto block = coin.draw(i, 0);
      if (rng::to_unit(block[0], block[1]) >= spec.random_stay_prob) decisions[i] = Decision::Evacuate;
    }
  }
  for (NodeId node : priority_set(rank, spec.gamma)) decisions[node] = Decision::Evacuate;
  return decisions;
}

double parse_gamma(std::string_view text) {
  bool percent = false;
  if (!text.empty() && text.back() == '%') {
    percent = true;
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("cannot parse gamma '" + std::string(text) + "'");
  }
  if (percent) value /= 100.0;
  if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("gamma must lie in [0, 1] (or 0%..100%)");
  return value;
}

}  // namespace evac
