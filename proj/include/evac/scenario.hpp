#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "evac/network.hpp"
#include "evac/payoff.hpp"

namespace evac {

using DecisionVector = std::vector<Decision>;

enum class Variant { RandomisedHighest, FixedHighest, RandomisedLowest, FixedLowest };

inline constexpr Variant kAllVariants[] = {Variant::RandomisedHighest, Variant::FixedHighest,
                                           Variant::RandomisedLowest, Variant::FixedLowest};

Variant variant_from_string(std::string_view text);
std::string_view to_string(Variant v) noexcept;
RankOrder rank_order_for(Variant v) noexcept;
bool is_randomised(Variant v) noexcept;

struct ScenarioSpec {
  Variant variant = Variant::RandomisedHighest;
  double gamma = 0.0;
  // Probability that a non-priority agent starts as Stay in randomised variants.
  double random_stay_prob = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// round(gamma * n), halves rounded up.
std::size_t priority_count(double gamma, std::size_t node_count);

// The first priority_count(gamma, n) nodes of the rank. Sets for increasing
// gamma are nested.
std::vector<NodeId> priority_set(const DegreeRank& rank, double gamma);

// Priority nodes start as Evacuate. The rest start as Stay (fixed variants)
// or draw Evacuate with probability 1 - random_stay_prob (randomised).
DecisionVector initialize_decisions(const Graph& graph, const DegreeRank& rank, const ScenarioSpec& spec);

// Parses "0.57", "57%".
double parse_gamma(std::string_view text);

}  // namespace evac
