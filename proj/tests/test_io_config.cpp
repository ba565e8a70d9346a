#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "evac/config.hpp"
#include "evac/error.hpp"
#include "evac/trajectory_io.hpp"
#include "helpers.hpp"

using namespace evac;

TEST_CASE("trajectory binary round trip") {
  const Graph g = generate_small_world(130, 4, 0.2, 3);
  DecisionVector initial(130, Decision::Stay);
  for (std::size_t i = 0; i < 130; i += 3) initial[i] = Decision::Evacuate;
  SimulationConfig c;
  c.timesteps = 25;
  c.seed = 8;
  c.matrix = paper_coefficient_matrix(0.1);
  for (bool payoffs : {false, true}) {
    c.record_payoffs = payoffs;
    const Trajectory traj = run(g, initial, c);
    std::stringstream buf;
    write_trajectory(traj, buf);
    const std::string bytes = buf.str();
    const std::size_t frame_bytes = (130 + 7) / 8;
    CHECK(bytes.size() == 40 + 26 * frame_bytes + (payoffs ? 26 * 130 * 8 : 0));
    CHECK(bytes.substr(0, 8) == "EVACTRJ1");
    const Trajectory back = read_trajectory(buf);
    CHECK(back == traj);
    CHECK(back.seed == 8);
    CHECK(back.config_digest == c.digest());
  }
}

TEST_CASE("trajectory reader rejects damaged input") {
  Trajectory traj(10, 3);
  std::stringstream good;
  write_trajectory(traj, good);
  const std::string bytes = good.str();

  std::istringstream truncated(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_trajectory(truncated), ConfigError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream magic(bad_magic);
  CHECK_THROWS_AS(read_trajectory(magic), ConfigError);
  CHECK_THROWS_AS(load_trajectory("/nonexistent/trajectory.bin"), ConfigError);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "seed = 12\n"
      "[network]\nsource = small-world\nn = 400\nk = 6\nrewire_prob = 0.25\n"
      "[payoff]\nmode = formula\ntheta = 0.1\n"
      "[scenario]\nvariant = fixed-lowest\ngamma = 43.02%\n"
      "[dynamics]\ntimesteps = 500\nwindow = 100\nneighbor_sampling = each-sequential\npin_priority = true\n"
      "[sweep]\nvariants = all\nthetas = 0, 0.1\ngammas = 0, 0.5, 1\nruns = 3\n");
  const ExperimentConfig c = parse_config(in, "exp.ini");
  CHECK(c.master_seed == 12);
  CHECK(c.network.source == NetworkSource::SmallWorld);
  CHECK(c.network.k == 6);
  CHECK(c.payoff_mode == PayoffMode::Formula);
  CHECK(c.payoff.theta == 0.1);
  CHECK(c.variant == Variant::FixedLowest);
  CHECK(c.gamma == doctest::Approx(0.4302));
  CHECK(c.timesteps == 500);
  CHECK(c.neighbor_sampling == NeighborSampling::EachNeighborSequential);
  CHECK(c.pin_priority);
  CHECK(c.sweep.variants.size() == 4);
  CHECK(c.sweep.thetas == std::vector<double>{0.0, 0.1});
  CHECK(c.sweep.gammas.size() == 3);
  CHECK(c.sweep.runs == 3);
  CHECK_NOTHROW(c.validate());
  const SimulationConfig sim = c.simulation_config();
  CHECK(sim.matrix == incentive_matrix(c.payoff));
}

TEST_CASE("config errors name the key") {
  std::istringstream unknown("[payoff]\nthetta = 0.1\n");
  CHECK_THROWS_WITH_AS(parse_config(unknown), doctest::Contains("payoff.thetta"), ConfigError);
  std::istringstream bad_value("[dynamics]\ntimesteps = lots\n");
  CHECK_THROWS_WITH_AS(parse_config(bad_value), doctest::Contains("dynamics.timesteps"), ConfigError);
  std::istringstream bad_section("[weather]\nrain = 1\n");
  CHECK_THROWS_WITH_AS(parse_config(bad_section), doctest::Contains("weather.rain"), ConfigError);

  ExperimentConfig c;
  CHECK_THROWS_WITH_AS(apply_override(c, "scenario.gama=0.5"), doctest::Contains("scenario.gama"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "no-equals"), ConfigError);
  apply_override(c, "scenario.gamma=57%");
  CHECK(c.gamma == doctest::Approx(0.57));

  c.window = 4000;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/exp.ini"), ConfigError);
}

TEST_CASE("seeds derive from the master seed unless pinned") {
  ExperimentConfig a, b;
  b.master_seed = 2;
  CHECK(a.resolved_dynamics_seed() != b.resolved_dynamics_seed());
  CHECK(a.resolved_scenario_seed() != a.resolved_dynamics_seed());
  CHECK(a.network_seed() != b.network_seed());
  b.dynamics_seed = a.resolved_dynamics_seed();
  CHECK(a.resolved_dynamics_seed() == b.resolved_dynamics_seed());
  CHECK(a.digest() != b.digest());
  ExperimentConfig a2;
  CHECK(a.digest() == a2.digest());
}

TEST_CASE("network construction from config") {
  NetworkSpec spec;
  const Graph reference = build_network(spec, 3);
  CHECK(degree_histogram(reference) == reference_histogram());
  spec.source = NetworkSource::SmallWorld;
  spec.n = 100;
  spec.k = 4;
  CHECK(build_network(spec, 3).node_count() == 100);

  const auto path = std::filesystem::temp_directory_path() / "evac_test_graph.edges";
  save_edge_list(reference, path);
  spec.source = NetworkSource::File;
  spec.path = path.string();
  CHECK(build_network(spec, 0) == reference);
  CHECK(graph_digest(build_network(spec, 0)) == graph_digest(reference));
  std::filesystem::remove(path);
  spec.path = "/nonexistent/graph.edges";
  CHECK_THROWS_WITH_AS(build_network(spec, 0), doctest::Contains("/nonexistent/graph.edges"), ConfigError);
}

TEST_CASE("list parsing") {
  CHECK(parse_real_list("-0.1,0,0.1, 0.2") == std::vector<double>{-0.1, 0.0, 0.1, 0.2});
  CHECK_THROWS_AS(parse_real_list("0.1,,x"), ConfigError);
  CHECK(parse_variant_list("fixed-highest,randomised-lowest") ==
        std::vector<Variant>{Variant::FixedHighest, Variant::RandomisedLowest});
}
