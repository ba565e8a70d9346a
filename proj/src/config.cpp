#include "evac/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

#include "evac/digest.hpp"
#include "evac/error.hpp"
#include "evac/format.hpp"
#include "evac/rng.hpp"

namespace evac {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string qualified(const std::string& section, const std::string& key) { return section + "." + key; }

double to_real(const std::string& section, const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError("config key " + qualified(section, key) + ": expected a number, got '" + text + "'");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& section, const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError("config key " + qualified(section, key) + ": expected a non-negative integer, got '" + text + "'");
  }
  return out;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key " + qualified(section, key) + ": expected true or false, got '" + text + "'");
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown config key '" + qualified(section, key) + "'");
}

// Wraps errors from list/enum parsers so they name the key.
template <typename F>
auto with_key(const std::string& section, const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError& e) {
    throw ConfigError("config key " + qualified(section, key) + ": " + e.what());
  }
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size()) throw ConfigError("bad number '" + item + "' in list");
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<Variant> parse_variant_list(const std::string& text) {
  std::vector<Variant> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      out.assign(std::begin(kAllVariants), std::end(kAllVariants));
      continue;
    }
    const Variant v = variant_from_string(item);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty variant list");
  return out;
}

void set_value(ExperimentConfig& c, const std::string& section, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (section == "network") {
    if (key == "source") {
      if (value == "paper") c.network.source = NetworkSource::Paper;
      else if (value == "small-world") c.network.source = NetworkSource::SmallWorld;
      else if (value == "file") c.network.source = NetworkSource::File;
      else throw ConfigError("config key network.source: expected paper, small-world or file, got '" + value + "'");
    } else if (key == "path") {
      c.network.path = value;
      c.network.source = NetworkSource::File;
    } else if (key == "n") c.network.n = to_unsigned(section, key, value);
    else if (key == "k") c.network.k = to_unsigned(section, key, value);
    else if (key == "rewire_prob") c.network.rewire_prob = to_real(section, key, value);
    else if (key == "seed") c.network.seed = to_unsigned(section, key, value);
    else unknown_key(section, key);
  } else if (section == "payoff") {
    if (key == "mode") c.payoff_mode = with_key(section, key, [&] { return payoff_mode_from_string(value); });
    else if (key == "p") c.payoff.p = to_real(section, key, value);
    else if (key == "alpha") c.payoff.alpha = to_real(section, key, value);
    else if (key == "beta") c.payoff.beta = to_real(section, key, value);
    else if (key == "r_E") c.payoff.r_E = to_real(section, key, value);
    else if (key == "r_S") c.payoff.r_S = to_real(section, key, value);
    else if (key == "r_T") c.payoff.r_T = to_real(section, key, value);
    else if (key == "r_D") c.payoff.r_D = to_real(section, key, value);
    else if (key == "theta") c.payoff.theta = to_real(section, key, value);
    else if (key == "property_value") c.payoff.property_value = to_real(section, key, value);
    else unknown_key(section, key);
  } else if (section == "scenario") {
    if (key == "variant") c.variant = with_key(section, key, [&] { return variant_from_string(value); });
    else if (key == "gamma") c.gamma = with_key(section, key, [&] { return parse_gamma(value); });
    else if (key == "random_stay_prob") c.random_stay_prob = to_real(section, key, value);
    else if (key == "seed") c.scenario_seed = to_unsigned(section, key, value);
    else unknown_key(section, key);
  } else if (section == "dynamics") {
    if (key == "timesteps") c.timesteps = to_unsigned(section, key, value);
    else if (key == "seed") c.dynamics_seed = to_unsigned(section, key, value);
    else if (key == "neighbor_sampling") {
      c.neighbor_sampling = with_key(section, key, [&] { return neighbor_sampling_from_string(value); });
    } else if (key == "pin_priority") c.pin_priority = to_bool(section, key, value);
    else if (key == "window") c.window = to_unsigned(section, key, value);
    else unknown_key(section, key);
  } else if (section == "sweep") {
    if (key == "variants") c.sweep.variants = with_key(section, key, [&] { return parse_variant_list(value); });
    else if (key == "thetas") c.sweep.thetas = with_key(section, key, [&] { return parse_real_list(value); });
    else if (key == "gammas") {
      c.sweep.gammas = with_key(section, key, [&] {
        std::vector<double> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!trim(item).empty()) out.push_back(parse_gamma(trim(item)));
        }
        return out;
      });
    } else if (key == "gamma_step") c.sweep.gamma_step = to_real(section, key, value);
    else if (key == "runs") c.sweep.runs = to_unsigned(section, key, value);
    else if (key == "inject_thresholds") c.sweep.inject_thresholds = to_bool(section, key, value);
    else unknown_key(section, key);
  } else if (section.empty() && key == "seed") {
    c.master_seed = to_unsigned(section, key, value);
  } else {
    throw ConfigError("unknown config key '" + section + '.' + key + "' (no section '" + section + "')");
  }
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string name = trim(assignment.substr(0, eq));
  const auto dot = name.find('.');
  if (dot == std::string::npos) {
    set_value(config, "", name, assignment.substr(eq + 1));
  } else {
    set_value(config, name.substr(0, dot), name.substr(dot + 1), assignment.substr(eq + 1));
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source_name) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(source_name, e.line(), e.message());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      // Top-level key outside any section, or a section with no keys.
      if (!body.data().empty()) set_value(config, "", section, body.data());
      continue;
    }
    for (const auto& [key, node] : body) set_value(config, section, key, node.data());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.string());
}

std::uint64_t ExperimentConfig::network_seed() const {
  return network.seed ? *network.seed : rng::combine(master_seed, 0x6e6574776f726bull);  // "network"
}
std::uint64_t ExperimentConfig::resolved_scenario_seed() const {
  return scenario_seed ? *scenario_seed : rng::combine(master_seed, 0x7363656e6172696full);  // "scenario"
}
std::uint64_t ExperimentConfig::resolved_dynamics_seed() const {
  return dynamics_seed ? *dynamics_seed : rng::combine(master_seed, 0x64796e616d696373ull);  // "dynamics"
}

ScenarioSpec ExperimentConfig::scenario_spec() const {
  return {variant, gamma, random_stay_prob, resolved_scenario_seed()};
}

SimulationConfig ExperimentConfig::simulation_config() const {
  SimulationConfig sim;
  sim.timesteps = timesteps;
  sim.seed = resolved_dynamics_seed();
  sim.matrix = make_matrix(payoff_mode, payoff);
  sim.neighbor_sampling = neighbor_sampling;
  sim.pin_priority = pin_priority;
  return sim;
}

void ExperimentConfig::validate() const {
  payoff.validate();
  scenario_spec().validate();
  simulation_config().validate();
  if (window == 0 || window > timesteps) {
    throw ConfigError("config key dynamics.window must lie in [1, timesteps]");
  }
  if (network.source == NetworkSource::File && network.path.empty()) {
    throw ConfigError("config key network.path is required when network.source = file");
  }
  if (sweep.runs == 0) throw ConfigError("config key sweep.runs must be >= 1");
  if (sweep.thetas.empty()) throw ConfigError("config key sweep.thetas must not be empty");
  if (sweep.variants.empty()) throw ConfigError("config key sweep.variants must not be empty");
  if (sweep.gammas.empty() && !(sweep.gamma_step > 0.0 && sweep.gamma_step <= 1.0)) {
    throw ConfigError("config key sweep.gamma_step must lie in (0, 1]");
  }
  for (double theta : sweep.thetas) {
    if (!(theta >= -1.0 && theta <= 1.0)) throw ConfigError("config key sweep.thetas: values must lie in [-1, 1]");
  }
}

std::uint64_t ExperimentConfig::digest() const {
  Digest d;
  d.text("experiment/v1").u64(master_seed);
  d.u64(static_cast<std::uint64_t>(network.source)).text(network.path).u64(network.n).u64(network.k);
  d.real(network.rewire_prob).u64(network_seed());
  d.text(to_string(payoff_mode));
  for (double v : {payoff.p, payoff.alpha, payoff.beta, payoff.r_E, payoff.r_S, payoff.r_T, payoff.r_D, payoff.theta,
                   payoff.property_value}) {
    d.real(v);
  }
  d.text(to_string(variant)).real(gamma).real(random_stay_prob).u64(resolved_scenario_seed());
  d.u64(timesteps).u64(window).u64(resolved_dynamics_seed()).text(to_string(neighbor_sampling));
  d.u64(pin_priority ? 1 : 0);
  for (Variant v : sweep.variants) d.text(to_string(v));
  for (double theta : sweep.thetas) d.real(theta);
  for (double g : sweep.gammas) d.real(g);
  d.real(sweep.gamma_step).u64(sweep.runs).u64(sweep.inject_thresholds ? 1 : 0);
  return d.value();
}

Graph build_network(const NetworkSpec& spec, std::uint64_t seed) {
  switch (spec.source) {
    case NetworkSource::Paper:
      return generate_from_histogram(reference_histogram(), seed);
    case NetworkSource::SmallWorld:
      return generate_small_world(spec.n, spec.k, spec.rewire_prob, seed);
    case NetworkSource::File:
      return load_edge_list(spec.path);
  }
  throw ConfigError("unknown network source");
}

std::uint64_t graph_digest(const Graph& graph) {
  Digest d;
  d.text("graph/v1").u64(graph.node_count()).u64(graph.edge_count());
  for (const auto& [a, b] : graph.edges()) d.u64((std::uint64_t{a} << 32) | b);
  return d.value();
}

}  // namespace evac
