#include "cpsa/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "cpsa/baselines.hpp"
#include "cpsa/error.hpp"

namespace cpsa::harness {

namespace cst = cpsa::constellation;
using nlohmann::json;

ScenarioSource::ScenarioSource(const ScenarioConfig& cfg)
    : cfg_(cfg.constellation),
      traffic_(cfg.traffic),
      synthetic_(cfg.synthetic),
      delay_(cfg.delay),
      slots_(cfg.slots),
      slot_seconds_(cfg.slot_seconds),
      start_(cfg.start_gmt),
      elements_(cst::build_walker(cfg.constellation)) {
  if (!synthetic_.enabled) {
    map_ = cfg.region_map.empty() ? traffic::synthetic_region_map(cfg.region_map_seed)
                                  : traffic::load_region_map(cfg.region_map);
    grid_.emplace(cfg_);
  }
}

UnixSeconds ScenarioSource::slot_gmt(int slot) const {
  return start_ + static_cast<UnixSeconds>(std::floor((slot - 1) * slot_seconds_));
}

std::vector<cst::SatState> ScenarioSource::states(int slot) const {
  const double dt = static_cast<double>(start_ - cfg_.epoch_gmt) + (slot - 1) * slot_seconds_;
  return cst::propagate_seconds(elements_, cfg_.epoch_gmt, dt);
}

traffic::RequestVector ScenarioSource::requests(int slot, std::span<const cst::SatState> states) const {
  const UnixSeconds gmt = slot_gmt(slot);
  if (!synthetic_.enabled) return traffic::satellite_requests(states, map_, gmt, traffic_, *grid_);

  traffic::RequestVector rv;
  rv.gmt = gmt;
  ga::Rng rng(ga::slot_seed(synthetic_.seed, slot));
  std::uniform_int_distribution<std::int64_t> draw(0, synthetic_.max_requests);
  for (std::size_t n = 0; n < states.size(); ++n) {
    rv.counts.push_back(draw(rng));
    rv.exact.push_back(static_cast<double>(rv.counts.back()));
  }
  rv.covered_region_total = rv.total_exact();
  return rv;
}

cost::SlotContext ScenarioSource::context(int slot) {
  const auto st = states(slot);
  auto dm = cst::shortest_paths(cst::isl_topology(st, cfg_));
  auto rv = requests(slot, st);
  return cost::make_slot_context(slot, slot_gmt(slot), slot_seconds_, std::move(dm), std::move(rv.counts), delay_);
}

std::unique_ptr<ga::Planner> make_planner(const ScenarioConfig& cfg, const std::string& strategy,
                                          ga::GenerationObserver observer) {
  if (strategy == "ga") return std::make_unique<ga::PriorPopulationPlanner>(cfg.ga, std::move(observer));
  if (strategy == "soft_leo") return std::make_unique<baselines::SoftLeoPlanner>(cfg.constellation, cfg.soft_leo_index);
  if (strategy == "static_cluster") {
    return std::make_unique<baselines::StaticClusterPlanner>(cfg.ga.cluster_max_iters, cfg.seed);
  }
  if (strategy == "brute_force") return std::make_unique<baselines::BruteForcePlanner>();
  throw ConfigError("strategy: unknown strategy \"" + strategy + "\"");
}

StrategyRun simulate(const ScenarioConfig& cfg, const std::string& strategy, ga::GenerationObserver observer,
                     const ga::SlotCallback& on_slot) {
  ScenarioSource source(cfg);
  auto planner = make_planner(cfg, strategy, std::move(observer));
  StrategyRun out;
  out.strategy = strategy;
  out.result = ga::run_horizon(source, *planner, cfg.weights, cfg.controllers_for(strategy), on_slot);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string metrics_row(const ga::SlotRecord& rec) {
  const auto& c = rec.cost;
  std::string row = std::to_string(rec.slot) + "," + format_gmt(rec.gmt);
  for (double v : {c.load_balance, c.avg_response_ms, c.migration_ms, c.reassignment_ms, c.sync_ms, c.objective}) {
    row += "," + format_double(v);
  }
  row += "," + std::to_string(rec.total_requests) + "," + std::to_string(rec.generations_run) + "," +
         std::to_string(rec.entering_backlog) + "," + std::to_string(rec.orphaned_backlog) + "," +
         std::to_string(rec.backlog_spill);
  return row;
}

void write_metrics_csv(std::ostream& out, const ga::HorizonResult& result) {
  out << kMetricsHeader << '\n';
  for (const auto& rec : result.slots) out << metrics_row(rec) << '\n';
}

json strategies_json(const StrategyRun& run) {
  json slots = json::array();
  for (const auto& rec : run.result.slots) {
    slots.push_back({{"slot", rec.slot},
                     {"gmt", format_gmt(rec.gmt)},
                     {"controllers", rec.strategy.controllers},
                     {"assignment", rec.strategy.assignment}});
  }
  return {{"strategy", run.strategy}, {"slots", slots}};
}

namespace {

json totals_json(const ga::HorizonResult& r) {
  double lb = 0, resp = 0, mig = 0, reas = 0, sync = 0, obj = 0;
  std::int64_t requests = 0;
  for (const auto& rec : r.slots) {
    lb += rec.cost.load_balance;
    resp += rec.cost.avg_response_ms;
    mig += rec.cost.migration_ms;
    reas += rec.cost.reassignment_ms;
    sync += rec.cost.sync_ms;
    obj += rec.cost.objective;
    requests += rec.total_requests;
  }
  return {{"load_balance", lb},     {"avg_response_ms", resp}, {"migration_ms", mig},
          {"reassignment_ms", reas}, {"sync_ms", sync},         {"objective", obj},
          {"total_requests", requests}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

json summary_json(const ScenarioConfig& cfg, const StrategyRun& run) {
  const auto& r = run.result;
  return {{"status", "complete"},
          {"strategy", run.strategy},
          {"controllers", cfg.controllers_for(run.strategy)},
          {"seed", cfg.seed},
          {"slots", r.slots.size()},
          {"totals", totals_json(r)},
          {"backlog",
           {{"arrivals", r.total_arrivals},
            {"processed", r.total_processed},
            {"final", r.final_backlog},
            {"orphaned", r.total_orphaned},
            {"conserved", r.conserved()}}},
          {"config", config_to_json(cfg)}};
}

StrategyRun run(const ScenarioConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  auto metrics = open_output(cfg.output_dir / "metrics.csv");
  std::ofstream convergence;
  if (cfg.emit_convergence) {
    convergence = open_output(cfg.output_dir / "convergence.csv");
    convergence << "slot,generation,best_objective\n";
  }
  metrics << kMetricsHeader << '\n';

  int completed = 0;
  auto on_slot = [&](const ga::SlotRecord& rec) {
    metrics << metrics_row(rec) << '\n' << std::flush;
    if (!metrics) throw std::runtime_error("write failed for metrics.csv");
    if (cfg.emit_convergence) {
      for (std::size_t g = 0; g < rec.convergence_trace.size(); ++g) {
        convergence << rec.slot << ',' << g << ',' << format_double(rec.convergence_trace[g]) << '\n';
      }
      convergence.flush();
    }
    ++completed;
  };

  StrategyRun result;
  try {
    result = simulate(cfg, cfg.strategy, {}, on_slot);
  } catch (const std::exception& e) {
    json partial = {{"status", "aborted"},
                    {"error", e.what()},
                    {"note", "metrics.csv holds the rows flushed before the failure"},
                    {"strategy", cfg.strategy},
                    {"seed", cfg.seed},
                    {"slots_completed", completed},
                    {"config", config_to_json(cfg)}};
    try {
      write_json(cfg.output_dir / "summary.json", partial);
    } catch (const std::exception&) {
      // The original failure is the one worth reporting.
    }
    throw;
  }
  write_json(cfg.output_dir / "strategies.json", strategies_json(result));
  write_json(cfg.output_dir / "summary.json", summary_json(cfg, result));
  return result;
}

std::vector<StrategyRun> compare(const ScenarioConfig& cfg, const std::vector<std::string>& strategies) {
  if (strategies.size() < 2) throw ConfigError("compare: at least two strategies are required");
  for (const auto& s : strategies) {
    if (std::find(kStrategies.begin(), kStrategies.end(), s) == kStrategies.end()) {
      throw ConfigError("compare: unknown strategy \"" + s + "\"");
    }
  }
  std::vector<StrategyRun> runs;
  for (const auto& s : strategies) runs.push_back(simulate(cfg, s));
  std::filesystem::create_directories(cfg.output_dir);
  auto out = open_output(cfg.output_dir / "compare.csv");
  write_compare_csv(out, runs);
  return runs;
}

void write_compare_csv(std::ostream& out, const std::vector<StrategyRun>& runs) {
  struct Row {
    int slot;
    const std::string* strategy;
    const ga::SlotRecord* rec;
    double migration_cdf;
    double reassignment_cdf;
  };
  auto cdf = [](const std::vector<double>& sorted, double x) {
    const auto n = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    return sorted.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(sorted.size());
  };

  std::vector<Row> rows;
  for (const auto& run : runs) {
    std::vector<double> mig, reas;
    for (const auto& rec : run.result.slots) {
      mig.push_back(rec.cost.migration_ms);
      reas.push_back(rec.cost.reassignment_ms);
    }
    std::sort(mig.begin(), mig.end());
    std::sort(reas.begin(), reas.end());
    for (const auto& rec : run.result.slots) {
      rows.push_back({rec.slot, &run.strategy, &rec, cdf(mig, rec.cost.migration_ms), cdf(reas, rec.cost.reassignment_ms)});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.slot != b.slot ? a.slot < b.slot : *a.strategy < *b.strategy;
  });

  out << "slot,gmt,strategy,load_balance,avg_response_ms,migration_ms,reassignment_ms,sync_ms,objective,"
         "total_requests,migration_cdf,reassignment_cdf\n";
  for (const auto& r : rows) {
    const auto& c = r.rec->cost;
    out << r.slot << ',' << format_gmt(r.rec->gmt) << ',' << *r.strategy;
    for (double v : {c.load_balance, c.avg_response_ms, c.migration_ms, c.reassignment_ms, c.sync_ms, c.objective}) {
      out << ',' << format_double(v);
    }
    out << ',' << r.rec->total_requests << ',' << format_double(r.migration_cdf) << ','
        << format_double(r.reassignment_cdf) << '\n';
  }
}

void write_request_trace(std::ostream& out, const ScenarioConfig& cfg) {
  ScenarioSource source(cfg);
  out << "slot,gmt,total_requests,total_exact,covered_region_total\n";
  for (int t = 1; t <= cfg.slots; ++t) {
    const auto rv = source.requests(t);
    out << t << ',' << format_gmt(rv.gmt) << ',' << rv.total() << ',' << format_double(rv.total_exact()) << ','
        << format_double(rv.covered_region_total) << '\n';
  }
}

namespace {

// Plans with the GA and, on the side, solves the identical slot problem
// exhaustively.
class OracleCheckPlanner : public ga::Planner {
 public:
  explicit OracleCheckPlanner(const ga::GAParams& params) : inner_(params) {}
  std::string name() const override { return "ga"; }

  ga::PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                      const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) override {
    auto best = baselines::brute_force(ctx, previous, backlogs, weights, k);
    auto result = inner_.plan(ctx, previous, backlogs, weights, k);
    const cost::Evaluator eval(ctx, previous, backlogs, weights);
    rows.push_back({ctx.slot, eval.objective(result.strategy), best.cost.objective, best.candidates});
    return result;
  }

  std::vector<OracleRow> rows;

 private:
  ga::PriorPopulationPlanner inner_;
};

}  // namespace

std::vector<OracleRow> oracle(const ScenarioConfig& cfg) {
  const int n = cfg.constellation.size();
  const double candidates = baselines::brute_force_candidates(n, cfg.controllers);
  if (candidates > baselines::kBruteForceLimit) {
    throw OracleSizeError("oracle: N=" + std::to_string(n) + ", K=" + std::to_string(cfg.controllers) +
                          " needs more than 10^7 candidates per slot");
  }
  ScenarioSource source(cfg);
  OracleCheckPlanner planner(cfg.ga);
  ga::run_horizon(source, planner, cfg.weights, cfg.controllers);
  return planner.rows;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "slot,ga_objective,oracle_objective,relative_gap,candidates\n";
  for (const auto& r : rows) {
    const double gap = r.oracle_objective != 0.0 ? (r.ga_objective - r.oracle_objective) / std::abs(r.oracle_objective)
                                                 : r.ga_objective - r.oracle_objective;
    out << r.slot << ',' << format_double(r.ga_objective) << ',' << format_double(r.oracle_objective) << ','
        << format_double(gap) << ',' << r.candidates << '\n';
  }
}

}  // namespace cpsa::harness
