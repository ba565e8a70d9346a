#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = evac::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("evac_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("net commands") {
  const fs::path dir = scratch("net");
  const std::string edges = (dir / "net.edges").string();
  REQUIRE(cli({"net", "gen-hist", "--paper", "--seed", "7", "-o", edges}).code == 0);
  const Result stats = cli({"net", "stats", edges});
  REQUIRE(stats.code == 0);
  const auto rows = lines_of(stats.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == "degree,count,population_pct,cumulative_highest_first,cumulative_lowest_first");
  CHECK(rows[1] == "9,2,0.04,0.0004,1");
  CHECK(rows[5] == "5,1886,37.72,0.5698,0.8074");
  CHECK(rows[8] == "2,60,1.2,1,0.012");

  std::ofstream(dir / "h.txt") << "# degrees\n2: 3\n";
  CHECK(cli({"net", "gen-hist", "--hist", (dir / "h.txt").string(), "-o", (dir / "tri.edges").string()}).code == 0);
  CHECK(cli({"net", "gen-ws", "--n", "50", "--k", "4", "--rewire", "0.1", "-o", (dir / "ws.edges").string()}).code ==
        0);
  CHECK(cli({"net", "stats", (dir / "ws.edges").string()}).out.starts_with("degree,"));

  const Result missing = cli({"net", "stats", (dir / "missing.edges").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("missing.edges") != std::string::npos);
  CHECK(cli({"net", "gen-ws", "--k", "3", "-o", (dir / "x").string()}).code == 2);
  CHECK(cli({"net", "frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("run command") {
  const fs::path dir = scratch("run");
  std::ofstream(dir / "exp.ini") << "[network]\nsource = small-world\nn = 200\nk = 4\n[dynamics]\ntimesteps = 60\n"
                                    "window = 20\n";
  const std::string cfg = (dir / "exp.ini").string();

  SUBCASE("all evacuating priority gives a flat series") {
    const Result r = cli({"run", "--config", cfg, "--gamma", "1", "--variant", "fixed-highest", "--out",
                          (dir / "a").string()});
    REQUIRE(r.code == 0);
    const auto rates = lines_of(slurp(dir / "a" / "rates.csv"));
    REQUIRE(rates.size() == 62);
    for (std::size_t t = 1; t < rates.size(); ++t) CHECK(rates[t] == std::to_string(t - 1) + ",1");
  }
  SUBCASE("identical inputs give identical outputs") {
    const std::vector<std::string> base{"run", "--config", cfg, "--seed", "3", "--gamma", "30%", "--theta", "0.1",
                                        "--emit", "heatmap", "--emit", "switches"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (dir / "x").string()});
    b.insert(b.end(), {"--out", (dir / "y").string()});
    REQUIRE(cli(a).code == 0);
    REQUIRE(cli(b).code == 0);
    for (const char* f : {"trajectory.bin", "rates.csv", "heatmap.csv", "switches.csv", "manifest.json"}) {
      CHECK(fs::exists(dir / "x" / f));
      CHECK(slurp(dir / "x" / f) == slurp(dir / "y" / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(dir / "x" / "manifest.json"));
    CHECK(manifest["tool_version"] == evac::cli::kToolVersion);
    CHECK(manifest["graph"]["source"] == "small-world");
    CHECK(manifest["scenario"]["gamma"] == 0.3);
    CHECK(manifest["outputs"].size() == 4);
    const auto heat = lines_of(slurp(dir / "x" / "heatmap.csv"));
    CHECK(heat.size() == 201);
    CHECK(lines_of(slurp(dir / "x" / "switches.csv")).front() == "degree,t,count");

    auto c = base;
    c[4] = "4";
    c.insert(c.end(), {"--out", (dir / "z").string()});
    REQUIRE(cli(c).code == 0);
    CHECK(slurp(dir / "x" / "trajectory.bin") != slurp(dir / "z" / "trajectory.bin"));
  }
  SUBCASE("flags override the file") {
    REQUIRE(cli({"run", "--config", cfg, "--set", "dynamics.timesteps=30", "--out", (dir / "o").string()}).code == 0);
    CHECK(lines_of(slurp(dir / "o" / "rates.csv")).size() == 32);
  }
  SUBCASE("configuration errors") {
    const Result bad = cli({"run", "--config", cfg, "--set", "payoff.thetta=1", "--out", (dir / "e").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("payoff.thetta") != std::string::npos);
    CHECK(cli({"run", "--config", (dir / "nope.ini").string()}).code == 2);
    CHECK(cli({"run", "--config", cfg, "--emit", "movie", "--out", (dir / "e").string()}).code == 2);
    CHECK(cli({"run", "--config", cfg, "--gamma", "2", "--out", (dir / "e").string()}).code == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("sweep commands") {
  const fs::path dir = scratch("sweep");
  std::ofstream(dir / "exp.ini") << "[network]\nsource = small-world\nn = 120\nk = 4\n[dynamics]\ntimesteps = 50\n"
                                    "window = 10\n";
  const std::string cfg = (dir / "exp.ini").string();
  const std::vector<std::string> common{"--config", cfg, "--seed", "1", "--runs", "2"};

  SUBCASE("worker count does not change any output") {
    auto one = std::vector<std::string>{"sweep", "fig2"};
    one.insert(one.end(), common.begin(), common.end());
    auto eight = one;
    one.insert(one.end(), {"--gamma-step", "0.25", "--workers", "1", "--out", (dir / "w1").string()});
    eight.insert(eight.end(), {"--gamma-step", "0.25", "--workers", "8", "--out", (dir / "w8").string()});
    REQUIRE(cli(one).code == 0);
    REQUIRE(cli(eight).code == 0);
    for (const char* f : {"records.csv", "aggregates.csv", "summary.json", "fig2_randomised-highest.csv",
                          "fig2_fixed-highest.csv", "manifest.json"}) {
      CHECK(slurp(dir / "w1" / f) == slurp(dir / "w8" / f));
    }
    const auto fig = lines_of(slurp(dir / "w1" / "fig2_fixed-highest.csv"));
    CHECK(fig.front() == "theta,gamma,mean_rate,sd");
  }
  SUBCASE("table output telescopes and resume checks the digest") {
    auto args = std::vector<std::string>{"sweep", "table6"};
    args.insert(args.end(), common.begin(), common.end());
    args.insert(args.end(), {"--out", (dir / "t").string()});
    const Result r = cli(args);
    REQUIRE(r.code == 0);
    const auto table = lines_of(slurp(dir / "t" / "table6.csv"));
    CHECK(table.front().starts_with("degree,population_pct,rate_change_-0.1"));
    CHECK(table[1].starts_with("start,"));
    CHECK(table.back().starts_with("total,"));

    const std::string before = slurp(dir / "t" / "table6.csv");
    auto resume = args;
    resume.push_back("--resume");
    CHECK(cli(resume).code == 0);
    CHECK(slurp(dir / "t" / "table6.csv") == before);
    resume.insert(resume.end(), {"--set", "dynamics.timesteps=51"});
    const Result refused = cli(resume);
    CHECK(refused.code == 2);
    CHECK(refused.err.find("digest") != std::string::npos);
  }
  fs::remove_all(dir);
}
