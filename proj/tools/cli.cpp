#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "evac/config.hpp"
#include "evac/digest.hpp"
#include "evac/dynamics.hpp"
#include "evac/error.hpp"
#include "evac/format.hpp"
#include "evac/metrics.hpp"
#include "evac/network.hpp"
#include "evac/rng.hpp"
#include "evac/sweep.hpp"
#include "evac/trajectory_io.hpp"

namespace evac::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("EVACSIM_WORKERS")) {
    try {
      const auto value = std::stoul(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("EVACSIM_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Digest d;
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) d.bytes(buf, static_cast<std::size_t>(in.gcount()));
  return d.value();
}

std::ofstream open_output(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

DegreeHistogram read_histogram_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open histogram '" + path.string() + "'");
  DegreeHistogram hist;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ':' || c == '=' || c == ',') c = ' ';
    }
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first.starts_with('#') || first.starts_with('[')) continue;
    std::size_t degree = 0, count = 0;
    std::string extra;
    try {
      degree = std::stoul(first);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "expected 'degree: count'");
    }
    if (!(fields >> count) || (fields >> extra)) throw ParseError(path.string(), line_no, "expected 'degree: count'");
    if (hist.contains(degree)) throw ParseError(path.string(), line_no, "degree listed twice");
    hist[degree] = count;
  }
  return hist;
}

std::string network_source_name(NetworkSource source) {
  switch (source) {
    case NetworkSource::Paper:
      return "paper-histogram";
    case NetworkSource::SmallWorld:
      return "small-world";
    case NetworkSource::File:
      return "file";
  }
  return "?";
}

json graph_json(const ExperimentConfig& cfg, const Graph& graph) {
  json j = {{"source", network_source_name(cfg.network.source)},
            {"digest", to_hex(graph_digest(graph))},
            {"node_count", graph.node_count()},
            {"edge_count", graph.edge_count()}};
  if (cfg.network.source == NetworkSource::File) {
    j["path"] = cfg.network.path;
  } else {
    j["seed"] = cfg.network_seed();
  }
  if (cfg.network.source == NetworkSource::SmallWorld) {
    j["n"] = cfg.network.n;
    j["k"] = cfg.network.k;
    j["rewire_prob"] = cfg.network.rewire_prob;
  }
  return j;
}

json payoff_json(const ExperimentConfig& cfg) {
  const auto& p = cfg.payoff;
  return {{"mode", std::string(to_string(cfg.payoff_mode))}, {"p", p.p},       {"alpha", p.alpha}, {"beta", p.beta},
          {"r_E", p.r_E},                       {"r_S", p.r_S},   {"r_T", p.r_T},     {"r_D", p.r_D},
          {"theta", p.theta},                   {"property_value", p.property_value}};
}

json dynamics_json(const ExperimentConfig& cfg) {
  return {{"timesteps", cfg.timesteps},
          {"window", cfg.window},
          {"seed", cfg.resolved_dynamics_seed()},
          {"neighbor_sampling", std::string(to_string(cfg.neighbor_sampling))},
          {"pin_priority", cfg.pin_priority}};
}

void write_manifest(const fs::path& dir, json manifest, const std::vector<fs::path>& outputs) {
  json files = json::array();
  for (const auto& path : outputs) {
    files.push_back({{"path", path.filename().string()}, {"digest", to_hex(file_digest(path))}});
  }
  manifest["outputs"] = files;
  auto out = open_output(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

// Options shared by `run` and the sweep commands.
struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string graph_path;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Config file (sectioned key = value)");
    app->add_option("--seed", seed, "Master seed; every random stream derives from it");
    app->add_option("--set", overrides, "Override a config key: section.key=value (repeatable)");
    app->add_option("--graph", graph_path, "Edge list to use instead of the configured network");
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.master_seed = *seed;
    for (const auto& assignment : overrides) apply_override(cfg, assignment);
    if (!graph_path.empty()) {
      cfg.network.source = NetworkSource::File;
      cfg.network.path = graph_path;
    }
    return cfg;
  }
};

SweepSettings settings_from(const ExperimentConfig& cfg) {
  SweepSettings s;
  s.payoff_mode = cfg.payoff_mode;
  s.payoff = cfg.payoff;
  s.timesteps = cfg.timesteps;
  s.window = cfg.window;
  s.neighbor_sampling = cfg.neighbor_sampling;
  s.pin_priority = cfg.pin_priority;
  s.random_stay_prob = cfg.random_stay_prob;
  return s;
}

int cmd_net_stats(const std::string& path, std::ostream& out) {
  const Graph graph = load_edge_list(path);
  const DegreeRank high = degree_rank(graph, RankOrder::HighestFirst);
  const DegreeRank low = degree_rank(graph, RankOrder::LowestFirst);
  std::map<std::size_t, double> high_cum, low_cum;
  for (std::size_t c = 0; c < high.classes.size(); ++c) high_cum[high.classes[c].degree] = high.threshold(c);
  for (std::size_t c = 0; c < low.classes.size(); ++c) low_cum[low.classes[c].degree] = low.threshold(c);

  out << "degree,count,population_pct,cumulative_highest_first,cumulative_lowest_first\n";
  for (const auto& cls : high.classes) {
    out << cls.degree << ',' << cls.count << ','
        << format_real(100.0 * static_cast<double>(cls.count) / static_cast<double>(graph.node_count())) << ','
        << format_real(high_cum[cls.degree]) << ',' << format_real(low_cum[cls.degree]) << '\n';
  }
  return 0;
}

struct RunOptions {
  CommonOptions common;
  std::string out_dir = "run-out";
  std::optional<std::string> variant;
  std::optional<std::string> gamma;
  std::optional<double> theta;
  std::optional<std::size_t> timesteps;
  std::vector<std::string> emit;
  std::size_t heatmap_stride = 1;
};

int cmd_run(const RunOptions& opt, std::ostream& out) {
  ExperimentConfig cfg = opt.common.load();
  if (opt.variant) cfg.variant = variant_from_string(*opt.variant);
  if (opt.gamma) cfg.gamma = parse_gamma(*opt.gamma);
  if (opt.theta) cfg.payoff.theta = *opt.theta;
  if (opt.timesteps) cfg.timesteps = *opt.timesteps;
  cfg.validate();

  bool emit_heatmap = false, emit_switches = false, emit_payoffs = false;
  for (const auto& e : opt.emit) {
    if (e == "heatmap") emit_heatmap = true;
    else if (e == "switches") emit_switches = true;
    else if (e == "payoffs") emit_payoffs = true;
    else throw ConfigError("unknown --emit value '" + e + "' (expected heatmap, switches or payoffs)");
  }

  const Graph graph = build_network(cfg.network, cfg.network_seed());
  const ScenarioSpec spec = cfg.scenario_spec();
  const std::uint64_t tie_seed = rng::combine(spec.seed, 1);
  const DegreeRank rank = degree_rank(graph, rank_order_for(spec.variant), tie_seed);
  const DecisionVector initial = initialize_decisions(graph, rank, spec);
  SimulationConfig sim = cfg.simulation_config();
  sim.record_payoffs = emit_payoffs;
  std::vector<char> pinned;
  if (sim.pin_priority) pinned = pin_mask(graph.node_count(), priority_set(rank, spec.gamma));

  const Trajectory trajectory = evac::run(graph, initial, sim, pinned);
  const RateSeries series = rate_series(trajectory);
  const double final = final_rate(series, cfg.window);

  const fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  std::vector<fs::path> outputs;
  {
    const fs::path path = dir / "trajectory.bin";
    save_trajectory(trajectory, path);
    outputs.push_back(path);
  }
  {
    const fs::path path = dir / "rates.csv";
    auto f = open_output(path);
    write_rate_series_csv(series, f);
    outputs.push_back(path);
  }
  if (emit_heatmap) {
    const fs::path path = dir / "heatmap.csv";
    const DegreeRank rows = degree_rank(graph, RankOrder::HighestFirst, tie_seed);
    auto f = open_output(path);
    write_heatmap_csv(decision_heatmap(trajectory, graph, rows), f, opt.heatmap_stride);
    outputs.push_back(path);
  }
  if (emit_switches) {
    const fs::path path = dir / "switches.csv";
    auto f = open_output(path);
    write_switch_counts_csv(switch_counts_by_degree(trajectory, graph), f);
    outputs.push_back(path);
  }

  json manifest = {{"tool", "evacsim"},
                   {"tool_version", kToolVersion},
                   {"command", "run"},
                   {"config_digest", to_hex(cfg.digest())},
                   {"master_seed", cfg.master_seed},
                   {"graph", graph_json(cfg, graph)},
                   {"payoff", payoff_json(cfg)},
                   {"scenario",
                    {{"variant", std::string(to_string(spec.variant))},
                     {"gamma", spec.gamma},
                     {"random_stay_prob", spec.random_stay_prob},
                     {"seed", spec.seed},
                     {"tie_seed", tie_seed}}},
                   {"dynamics", dynamics_json(cfg)},
                   {"final_rate", final}};
  write_manifest(dir, manifest, outputs);
  out << "final_rate," << format_real(final) << '\n';
  return 0;
}

enum class SweepKind { Run, Table5, Table6, Fig2, Fig3 };

struct SweepCliOptions {
  CommonOptions common;
  std::string out_dir = "sweep-out";
  std::size_t workers = 0;
  bool resume = false;
  std::optional<std::size_t> runs;
  std::optional<double> gamma_step;
  std::optional<std::string> thetas;
  std::optional<std::string> variants;
  bool no_thresholds = false;
};

int cmd_sweep(SweepKind kind, const SweepCliOptions& opt, std::ostream& out) {
  ExperimentConfig cfg = opt.common.load();
  if (opt.runs) cfg.sweep.runs = *opt.runs;
  if (opt.gamma_step) {
    cfg.sweep.gamma_step = *opt.gamma_step;
    cfg.sweep.gammas.clear();
  }
  if (opt.thetas) cfg.sweep.thetas = parse_real_list(*opt.thetas);
  if (opt.no_thresholds) cfg.sweep.inject_thresholds = false;

  std::vector<Variant> variants = cfg.sweep.variants;
  std::string command = "sweep run";
  switch (kind) {
    case SweepKind::Run:
      break;
    case SweepKind::Table5:
      variants = {Variant::RandomisedHighest};
      command = "sweep table5";
      break;
    case SweepKind::Table6:
      variants = {Variant::RandomisedLowest};
      command = "sweep table6";
      break;
    case SweepKind::Fig2:
      variants = {Variant::RandomisedHighest, Variant::FixedHighest};
      command = "sweep fig2";
      if (!opt.gamma_step && cfg.sweep.gammas.empty() && opt.common.config_path.empty()) cfg.sweep.gamma_step = 0.01;
      break;
    case SweepKind::Fig3:
      variants = {Variant::RandomisedLowest, Variant::FixedLowest};
      command = "sweep fig3";
      if (!opt.gamma_step && cfg.sweep.gammas.empty() && opt.common.config_path.empty()) cfg.sweep.gamma_step = 0.01;
      break;
  }
  if (opt.variants) variants = parse_variant_list(*opt.variants);
  cfg.sweep.variants = variants;
  cfg.validate();

  const Graph graph = build_network(cfg.network, cfg.network_seed());
  SweepGrid grid;
  grid.variants = variants;
  grid.thetas = cfg.sweep.thetas;
  grid.runs = cfg.sweep.runs;
  grid.master_seed = cfg.master_seed;
  if (kind == SweepKind::Table5 || kind == SweepKind::Table6) {
    grid.gammas = with_degree_thresholds({}, graph, variants);
  } else {
    grid.gammas = cfg.sweep.gammas.empty() ? gamma_range(cfg.sweep.gamma_step) : cfg.sweep.gammas;
    if (cfg.sweep.inject_thresholds) grid.gammas = with_degree_thresholds(grid.gammas, graph, variants);
  }
  const SweepSettings settings = settings_from(cfg);

  const fs::path dir = opt.out_dir;
  fs::create_directories(dir);
  SweepOptions run_options;
  run_options.workers = opt.workers > 0 ? opt.workers : default_workers();
  run_options.journal = dir / "journal.csv";
  run_options.resume = opt.resume;
  const SweepResult result = run_sweep(graph, grid, settings, run_options);

  std::vector<fs::path> outputs;
  auto emit = [&](const std::string& name, auto&& writer) {
    const fs::path path = dir / name;
    auto f = open_output(path);
    writer(f);
    f.close();
    outputs.push_back(path);
  };
  emit("records.csv", [&](std::ostream& f) { write_records_csv(result, f); });
  emit("aggregates.csv", [&](std::ostream& f) { write_aggregates_csv(result, f); });
  emit("summary.json", [&](std::ostream& f) { f << summary_json(result, grid, settings, graph_digest(graph)); });

  if (kind == SweepKind::Table5 || kind == SweepKind::Table6) {
    const Variant v = variants.front();
    const DegreeRank rank = degree_rank(graph, rank_order_for(v));
    const ContributionTable table = contribution_from_sweep(result, rank, v, grid.thetas);
    const std::string name = kind == SweepKind::Table5 ? "table5.csv" : "table6.csv";
    emit(name, [&](std::ostream& f) { write_contribution_csv(table, f); });
    write_contribution_csv(table, out);
  } else if (kind == SweepKind::Fig2 || kind == SweepKind::Fig3) {
    const std::string prefix = kind == SweepKind::Fig2 ? "fig2_" : "fig3_";
    for (Variant v : variants) {
      emit(prefix + std::string(to_string(v)) + ".csv", [&](std::ostream& f) { write_figure_csv(result, v, f); });
    }
  }

  json manifest = {{"tool", "evacsim"},
                   {"tool_version", kToolVersion},
                   {"command", command},
                   {"config_digest", to_hex(cfg.digest())},
                   {"sweep_digest", to_hex(result.config_digest)},
                   {"master_seed", cfg.master_seed},
                   {"graph", graph_json(cfg, graph)},
                   {"payoff", payoff_json(cfg)},
                   {"random_stay_prob", cfg.random_stay_prob},
                   {"dynamics", dynamics_json(cfg)},
                   {"grid",
                    {{"variants", [&] {
                        json a = json::array();
                        for (Variant v : variants) a.push_back(std::string(to_string(v)));
                        return a;
                      }()},
                     {"thetas", grid.thetas},
                     {"gammas", grid.gammas},
                     {"runs", grid.runs}}}};
  write_manifest(dir, manifest, outputs);
  out << "cells," << result.aggregates.size() << ",records," << result.records.size() << ",out," << dir.string()
      << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Household evacuation decisions as an evolutionary game on a social network", "evacsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // net
  auto* net = app.add_subcommand("net", "Generate and inspect networks");
  net->require_subcommand(1);
  std::size_t ws_n = 5000, ws_k = 4;
  double ws_rewire = 0.1;
  std::uint64_t net_seed = 1;
  std::string net_out;
  auto* gen_ws = net->add_subcommand("gen-ws", "Watts-Strogatz small-world graph");
  gen_ws->add_option("--n", ws_n, "Node count")->capture_default_str();
  gen_ws->add_option("--k", ws_k, "Lattice degree (even)")->capture_default_str();
  gen_ws->add_option("--rewire", ws_rewire, "Rewiring probability")->capture_default_str();
  gen_ws->add_option("--seed", net_seed, "Seed")->capture_default_str();
  gen_ws->add_option("-o,--output", net_out, "Edge list output path")->required();

  bool use_reference = false;
  std::string hist_path;
  auto* gen_hist = net->add_subcommand("gen-hist", "Configuration-model graph with an exact degree histogram");
  auto* paper_flag = gen_hist->add_flag("--paper", use_reference, "Use the 5,000-node reference histogram");
  gen_hist->add_option("--hist", hist_path, "Histogram file with 'degree: count' lines")->excludes(paper_flag);
  gen_hist->add_option("--seed", net_seed, "Seed")->capture_default_str();
  gen_hist->add_option("-o,--output", net_out, "Edge list output path")->required();

  std::string stats_path;
  auto* stats = net->add_subcommand("stats", "Degree histogram and cumulative thresholds as CSV");
  stats->add_option("edges", stats_path, "Edge list")->required();

  // run
  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "Single simulation run");
  run_opt.common.attach(run_cmd);
  run_cmd->add_option("-o,--out", run_opt.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--variant", run_opt.variant, "randomised-highest | fixed-highest | randomised-lowest | fixed-lowest");
  run_cmd->add_option("--gamma", run_opt.gamma, "Priority fraction (0.57 or 57%)");
  run_cmd->add_option("--theta", run_opt.theta, "Recovery incentive fraction");
  run_cmd->add_option("--timesteps", run_opt.timesteps, "Number of timesteps");
  run_cmd->add_option("--emit", run_opt.emit, "Extra outputs: heatmap, switches, payoffs (repeatable)");
  run_cmd->add_option("--heatmap-stride", run_opt.heatmap_stride, "Keep every n-th heatmap column")
      ->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps and table/figure reproductions");
  sweep->require_subcommand(1);
  SweepCliOptions sweep_opt;
  SweepKind kind = SweepKind::Run;
  auto add_sweep = [&](const char* name, const char* help, SweepKind k) {
    auto* sub = sweep->add_subcommand(name, help);
    sweep_opt.common.attach(sub);
    sub->add_option("-o,--out", sweep_opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", sweep_opt.workers, "Worker threads (default: $EVACSIM_WORKERS or hardware)");
    sub->add_flag("--resume", sweep_opt.resume, "Skip cells already recorded in the output journal");
    sub->add_option("--runs", sweep_opt.runs, "Runs per cell");
    sub->add_option("--gamma-step", sweep_opt.gamma_step, "Gamma grid spacing");
    sub->add_option("--thetas", sweep_opt.thetas, "Comma-separated theta values");
    sub->add_option("--variants", sweep_opt.variants, "Comma-separated scenario variants");
    sub->add_flag("--no-thresholds", sweep_opt.no_thresholds, "Do not inject degree-threshold gammas");
    sub->callback([&kind, k] { kind = k; });
  };
  add_sweep("run", "Sweep the grid from the config", SweepKind::Run);
  add_sweep("table5", "Degree contributions, randomised highest-degree", SweepKind::Table5);
  add_sweep("table6", "Degree contributions, randomised lowest-degree", SweepKind::Table6);
  add_sweep("fig2", "Rate vs gamma, highest-degree scenarios", SweepKind::Fig2);
  add_sweep("fig3", "Rate vs gamma, lowest-degree scenarios", SweepKind::Fig3);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*net) {
      if (*gen_ws) {
        save_edge_list(generate_small_world(ws_n, ws_k, ws_rewire, net_seed), net_out);
        return 0;
      }
      if (*gen_hist) {
        if (!use_reference && hist_path.empty()) throw ConfigError("net gen-hist needs --paper or --hist FILE");
        const DegreeHistogram hist = use_reference ? reference_histogram() : read_histogram_file(hist_path);
        save_edge_list(generate_from_histogram(hist, net_seed), net_out);
        return 0;
      }
      return cmd_net_stats(stats_path, out);
    }
    if (*run_cmd) return cmd_run(run_opt, out);
    if (*sweep) return cmd_sweep(kind, sweep_opt, out);
  } catch (const ConfigError& e) {
    err << "evacsim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "evacsim: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace evac::cli
