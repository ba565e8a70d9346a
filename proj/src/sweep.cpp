#include "evac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "evac/digest.hpp"
#include "evac/error.hpp"
#include "evac/format.hpp"
#include "evac/rng.hpp"

namespace evac {

namespace {

constexpr double kAxisTolerance = 1e-12;
constexpr std::string_view kJournalMagic = "# evac-sweep-journal v1 digest=";

bool same_value(double a, double b) { return std::abs(a - b) <= kAxisTolerance; }

using RecordMapKey = std::tuple<int, std::uint64_t, std::uint64_t, std::size_t>;

RecordMapKey map_key(const CellKey& key) {
  const double theta = key.theta == 0.0 ? 0.0 : key.theta;
  const double gamma = key.gamma == 0.0 ? 0.0 : key.gamma;
  return {static_cast<int>(key.variant), std::bit_cast<std::uint64_t>(theta), std::bit_cast<std::uint64_t>(gamma),
          key.run};
}

std::string describe(const CellKey& key) {
  return "cell (" + std::string(to_string(key.variant)) + ", theta=" + format_real(key.theta) +
         ", gamma=" + format_real(key.gamma) + ", run=" + std::to_string(key.run) + ")";
}

std::string journal_row(const CellRecord& r) {
  return std::string(to_string(r.key.variant)) + ',' + format_real(r.key.theta) + ',' + format_real(r.key.gamma) +
         ',' + std::to_string(r.key.run) + ',' + to_hex(r.seed) + ',' + format_real(r.final_rate);
}

std::string row_check(std::uint64_t digest, const std::string& row) { return Digest{}.u64(digest).text(row).hex(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw ConfigError("bad number '" + text + "'");
  return value;
}

std::map<RecordMapKey, CellRecord> read_journal(const std::filesystem::path& path, std::uint64_t digest,
                                                std::uint64_t master_seed) {
  std::map<RecordMapKey, CellRecord> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line)) return done;
  if (!line.starts_with(kJournalMagic)) {
    throw ConfigError("sweep journal '" + path.string() + "' has an unrecognised header");
  }
  const std::string stored = line.substr(kJournalMagic.size());
  if (stored != to_hex(digest)) {
    throw ConfigError("sweep journal '" + path.string() + "' digest mismatch: journal " + stored + ", current " +
                      to_hex(digest) + "; refusing to resume");
  }
  std::size_t line_no = 1;
  std::getline(in, line);  // column header
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const auto last_comma = line.rfind(',');
    if (fields.size() != 7 || last_comma == std::string::npos ||
        row_check(digest, line.substr(0, last_comma)) != fields[6]) {
      throw ParseError(path.string(), line_no, "corrupt journal row (digest mismatch); refusing to resume");
    }
    CellRecord record;
    record.key.variant = variant_from_string(fields[0]);
    record.key.theta = parse_double(fields[1]);
    record.key.gamma = parse_double(fields[2]);
    record.key.run = static_cast<std::size_t>(std::stoull(fields[3]));
    record.seed = from_hex(fields[4]);
    record.final_rate = parse_double(fields[5]);
    if (record.seed != cell_seed(master_seed, record.key)) {
      throw ParseError(path.string(), line_no, "journal row seed does not match the cell coordinates");
    }
    done[map_key(record.key)] = record;
  }
  return done;
}

}  // namespace

void SweepGrid::validate() const {
  if (variants.empty()) throw ConfigError("sweep grid needs at least one variant");
  if (thetas.empty()) throw ConfigError("sweep grid needs at least one theta");
  if (gammas.empty()) throw ConfigError("sweep grid needs at least one gamma");
  if (runs == 0) throw ConfigError("sweep grid needs runs >= 1");
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("sweep gamma " + format_real(g) + " outside [0, 1]");
  }
  for (double t : thetas) {
    if (!(t >= -1.0 && t <= 1.0)) throw ConfigError("sweep theta " + format_real(t) + " outside [-1, 1]");
  }
}

void SweepSettings::validate() const {
  payoff.validate();
  if (timesteps < 1) throw ConfigError("timesteps must be >= 1");
  if (window == 0 || window > timesteps) throw ConfigError("window must lie in [1, timesteps]");
  if (!(random_stay_prob >= 0.0 && random_stay_prob <= 1.0)) throw ConfigError("random_stay_prob outside [0, 1]");
}

std::vector<double> gamma_range(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("gamma step must lie in (0, 1]");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double g = std::round(static_cast<double>(i) * step * 1e9) / 1e9;
    if (g > 1.0 + kAxisTolerance) break;
    out.push_back(std::min(g, 1.0));
  }
  if (!same_value(out.back(), 1.0)) out.push_back(1.0);
  return out;
}

std::vector<double> with_degree_thresholds(std::vector<double> gammas, const Graph& graph,
                                           const std::vector<Variant>& variants) {
  gammas.push_back(0.0);
  for (RankOrder order : {RankOrder::HighestFirst, RankOrder::LowestFirst}) {
    const bool used = std::any_of(variants.begin(), variants.end(),
                                  [order](Variant v) { return rank_order_for(v) == order; });
    if (!used) continue;
    const DegreeRank rank = degree_rank(graph, order);
    for (std::size_t c = 0; c < rank.classes.size(); ++c) gammas.push_back(rank.threshold(c));
  }
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end(), same_value), gammas.end());
  return gammas;
}

std::uint64_t cell_seed(std::uint64_t master_seed, const CellKey& key) {
  const double theta = key.theta == 0.0 ? 0.0 : key.theta;
  const double gamma = key.gamma == 0.0 ? 0.0 : key.gamma;
  std::uint64_t s = rng::combine(master_seed, static_cast<std::uint64_t>(key.variant));
  s = rng::combine(s, std::bit_cast<std::uint64_t>(theta));
  s = rng::combine(s, std::bit_cast<std::uint64_t>(gamma));
  return rng::combine(s, key.run);
}

std::uint64_t sweep_digest(const Graph& graph, const SweepSettings& settings, std::uint64_t master_seed) {
  Digest d;
  d.text("sweep/v1").u64(master_seed);
  const auto edges = graph.edges();
  d.u64(graph.node_count()).u64(edges.size());
  for (const auto& [a, b] : edges) d.u64((std::uint64_t{a} << 32) | b);
  d.text(to_string(settings.payoff_mode));
  const auto& p = settings.payoff;
  for (double v : {p.p, p.alpha, p.beta, p.r_E, p.r_S, p.r_T, p.r_D, p.property_value}) d.real(v);
  d.u64(settings.timesteps).u64(settings.window).text(to_string(settings.neighbor_sampling));
  d.u64(settings.pin_priority ? 1 : 0).real(settings.random_stay_prob);
  return d.value();
}

double run_cell(const Graph& graph, const SweepSettings& settings, const CellKey& key, std::uint64_t seed) {
  const DegreeRank rank = degree_rank(graph, rank_order_for(key.variant), rng::combine(seed, 1));
  const ScenarioSpec spec{key.variant, key.gamma, settings.random_stay_prob, rng::combine(seed, 2)};
  const DecisionVector initial = initialize_decisions(graph, rank, spec);

  PayoffParams params = settings.payoff;
  params.theta = key.theta;
  SimulationConfig sim;
  sim.timesteps = settings.timesteps;
  sim.seed = rng::combine(seed, 3);
  sim.matrix = make_matrix(settings.payoff_mode, params);
  sim.neighbor_sampling = settings.neighbor_sampling;
  sim.pin_priority = settings.pin_priority;

  std::vector<char> pinned;
  if (settings.pin_priority) pinned = pin_mask(graph.node_count(), priority_set(rank, key.gamma));
  const auto counts = run_evacuee_counts(graph, initial, sim, pinned);
  return final_rate(rate_series(counts, graph.node_count()), settings.window);
}

const CellAggregate* SweepResult::find(Variant variant, double theta, double gamma) const {
  for (const auto& a : aggregates) {
    if (a.variant == variant && same_value(a.theta, theta) && same_value(a.gamma, gamma)) return &a;
  }
  return nullptr;
}

SweepResult run_sweep(const Graph& graph, const SweepGrid& grid, const SweepSettings& settings,
                      const SweepOptions& options) {
  grid.validate();
  settings.validate();

  SweepResult result;
  result.config_digest = sweep_digest(graph, settings, grid.master_seed);

  for (Variant v : grid.variants) {
    for (double theta : grid.thetas) {
      for (double gamma : grid.gammas) {
        for (std::size_t run = 0; run < grid.runs; ++run) {
          CellRecord record;
          record.key = {v, theta, gamma, run};
          record.seed = cell_seed(grid.master_seed, record.key);
          result.records.push_back(record);
        }
      }
    }
  }

  std::map<RecordMapKey, CellRecord> done;
  if (!options.journal.empty() && options.resume) {
    done = read_journal(options.journal, result.config_digest, grid.master_seed);
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto it = done.find(map_key(result.records[i].key));
    if (it != done.end()) {
      result.records[i].final_rate = it->second.final_rate;
    } else {
      pending.push_back(i);
    }
  }

  std::ofstream journal;
  if (!options.journal.empty()) {
    const bool append = options.resume && std::filesystem::exists(options.journal) &&
                        std::filesystem::file_size(options.journal) > 0;
    journal.open(options.journal, append ? std::ios::app : std::ios::trunc);
    if (!journal) throw std::runtime_error("cannot open sweep journal '" + options.journal.string() + "'");
    if (!append) {
      journal << kJournalMagic << to_hex(result.config_digest) << '\n';
      journal << "variant,theta,gamma,run,seed,final_rate,check\n";
      journal.flush();
    }
  }

  std::vector<std::exception_ptr> errors(result.records.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex journal_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size() || failed.load()) return;
      CellRecord& record = result.records[pending[slot]];
      try {
        record.final_rate = run_cell(graph, settings, record.key, record.seed);
      } catch (...) {
        errors[pending[slot]] = std::current_exception();
        failed = true;
        return;
      }
      if (journal.is_open()) {
        const std::string row = journal_row(record);
        std::lock_guard lock(journal_mutex);
        journal << row << ',' << row_check(result.config_digest, row) << '\n';
        journal.flush();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, pending.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    const std::string where = describe(result.records[i].key);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }

  for (std::size_t i = 0; i < result.records.size(); i += grid.runs) {
    std::vector<double> rates;
    for (std::size_t r = 0; r < grid.runs; ++r) rates.push_back(result.records[i + r].final_rate);
    const CellKey& key = result.records[i].key;
    result.aggregates.push_back({key.variant, key.theta, key.gamma, aggregate_runs(rates)});
  }
  return result;
}

std::vector<std::vector<double>> threshold_experiment(const Graph& graph, const SweepSettings& settings,
                                                      double theta, Variant variant,
                                                      const std::vector<double>& gammas, std::size_t repeats,
                                                      std::uint64_t master_seed, std::size_t workers) {
  SweepGrid grid;
  grid.variants = {variant};
  grid.thetas = {theta};
  grid.gammas = gammas;
  grid.runs = repeats;
  grid.master_seed = master_seed;
  const SweepResult result = run_sweep(graph, grid, settings, {workers, {}, false});

  std::vector<std::vector<double>> out(gammas.size());
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    for (std::size_t r = 0; r < repeats; ++r) out[g].push_back(result.records[g * repeats + r].final_rate);
  }
  return out;
}

ContributionTable contribution_from_sweep(const SweepResult& result, const DegreeRank& rank, Variant variant,
                                          const std::vector<double>& thetas) {
  if (rank.order != rank_order_for(variant)) throw ConfigError("rank order does not match the variant");
  std::vector<std::vector<double>> rates;
  for (double theta : thetas) {
    std::vector<double> column;
    auto lookup = [&](double gamma) {
      const CellAggregate* cell = result.find(variant, theta, gamma);
      if (!cell) {
        throw ConfigError("sweep has no cell for " + std::string(to_string(variant)) + " theta=" + format_real(theta) +
                          " gamma=" + format_real(gamma));
      }
      return cell->stats.mean;
    };
    column.push_back(lookup(0.0));
    for (std::size_t c = 0; c < rank.classes.size(); ++c) column.push_back(lookup(rank.threshold(c)));
    rates.push_back(std::move(column));
  }
  return degree_contribution(rank, thetas, rates);
}

void write_records_csv(const SweepResult& result, std::ostream& out) {
  out << "# config_digest=" << to_hex(result.config_digest) << '\n';
  out << "variant,theta,gamma,run,seed,final_rate\n";
  for (const auto& r : result.records) out << journal_row(r) << '\n';
}

void write_aggregates_csv(const SweepResult& result, std::ostream& out) {
  out << "scenario,theta,gamma,mean,sd,n_runs\n";
  for (const auto& a : result.aggregates) {
    out << to_string(a.variant) << ',' << format_real(a.theta) << ',' << format_real(a.gamma) << ','
        << format_real(a.stats.mean) << ',' << format_real(a.stats.sd) << ',' << a.stats.runs << '\n';
  }
}

void write_figure_csv(const SweepResult& result, Variant variant, std::ostream& out) {
  out << "theta,gamma,mean_rate,sd\n";
  for (const auto& a : result.aggregates) {
    if (a.variant != variant) continue;
    out << format_real(a.theta) << ',' << format_real(a.gamma) << ',' << format_real(a.stats.mean) << ','
        << format_real(a.stats.sd) << '\n';
  }
}

std::string summary_json(const SweepResult& result, const SweepGrid& grid, const SweepSettings& settings,
                         std::uint64_t graph_fingerprint) {
  nlohmann::ordered_json j;
  j["format"] = "evac-sweep-summary/1";
  j["config_digest"] = to_hex(result.config_digest);
  j["graph_digest"] = to_hex(graph_fingerprint);
  j["master_seed"] = grid.master_seed;
  j["runs_per_cell"] = grid.runs;
  j["settings"] = {{"payoff_mode", to_string(settings.payoff_mode)},
                   {"timesteps", settings.timesteps},
                   {"window", settings.window},
                   {"neighbor_sampling", to_string(settings.neighbor_sampling)},
                   {"pin_priority", settings.pin_priority},
                   {"random_stay_prob", settings.random_stay_prob}};
  auto& cells = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& a : result.aggregates) {
    cells.push_back({{"variant", to_string(a.variant)},
                     {"theta", a.theta},
                     {"gamma", a.gamma},
                     {"mean", a.stats.mean},
                     {"sd", a.stats.sd},
                     {"n_runs", a.stats.runs}});
  }
  return j.dump(2) + "\n";
}

}  // namespace evac
