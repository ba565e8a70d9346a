#pragma once

// Experiment configuration: a sectioned key = value file.
//
//   [network]   source = paper | small-world | file, path, n, k, rewire_prob, seed
//   [payoff]    mode = paper | formula | baseline, p, alpha, beta, r_E, r_S, r_T,
//               r_D, theta, property_value
//   [scenario]  variant, gamma, random_stay_prob, seed
//   [dynamics]  timesteps, seed, neighbor_sampling, pin_priority, window
//   [sweep]     variants, thetas, gammas, gamma_step, runs, inject_thresholds
//
// Any key may be overridden as "section.key=value". Unset seeds are derived
// from the master seed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evac/dynamics.hpp"
#include "evac/network.hpp"
#include "evac/payoff.hpp"
#include "evac/scenario.hpp"

namespace evac {

enum class NetworkSource { Paper, SmallWorld, File };

struct NetworkSpec {
  NetworkSource source = NetworkSource::Paper;
  std::string path;
  std::size_t n = 5000;
  std::size_t k = 4;
  double rewire_prob = 0.1;
  std::optional<std::uint64_t> seed;
};

struct SweepAxes {
  std::vector<Variant> variants{Variant::RandomisedHighest};
  std::vector<double> thetas{-0.10, 0.0, 0.10, 0.20};
  // Explicit values win over gamma_step.
  std::vector<double> gammas;
  double gamma_step = 0.002;
  std::size_t runs = 5;
  bool inject_thresholds = true;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  NetworkSpec network;
  PayoffMode payoff_mode = PayoffMode::Paper;
  PayoffParams payoff;
  Variant variant = Variant::RandomisedHighest;
  double gamma = 0.0;
  double random_stay_prob = 0.5;
  std::optional<std::uint64_t> scenario_seed;
  std::size_t timesteps = 3000;
  std::size_t window = 1000;
  std::optional<std::uint64_t> dynamics_seed;
  NeighborSampling neighbor_sampling = NeighborSampling::OneRandomNeighbor;
  bool pin_priority = false;
  SweepAxes sweep;

  std::uint64_t network_seed() const;
  std::uint64_t resolved_scenario_seed() const;
  std::uint64_t resolved_dynamics_seed() const;

  ScenarioSpec scenario_spec() const;
  SimulationConfig simulation_config() const;

  // Throws ConfigError on the first invalid value.
  void validate() const;
  // Fingerprint of every field after seed resolution.
  std::uint64_t digest() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// "section.key=value"; unknown keys raise ConfigError naming the key.
void apply_override(ExperimentConfig& config, const std::string& assignment);
void set_value(ExperimentConfig& config, const std::string& section, const std::string& key, const std::string& value);

Graph build_network(const NetworkSpec& spec, std::uint64_t seed);
std::uint64_t graph_digest(const Graph& graph);

std::vector<double> parse_real_list(const std::string& text);
std::vector<Variant> parse_variant_list(const std::string& text);

}  // namespace evac
