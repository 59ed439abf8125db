#pragma once

// Scenario configuration, slot-by-slot orchestration and artifact emission.
//
// Units on disk: delays in ms, distances in km, requests as counts, times as
// ISO-8601 GMT strings. Satellite and region indices in JSON are 0-based.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpsa/constellation.hpp"
#include "cpsa/cost.hpp"
#include "cpsa/ga.hpp"
#include "cpsa/horizon.hpp"
#include "cpsa/traffic.hpp"

namespace cpsa::harness {

inline const std::vector<std::string> kStrategies = {"ga", "soft_leo", "static_cluster", "brute_force"};

// Replaces the region map with uniform per-switch request counts in
// [0, max_requests], drawn from a stream seeded per slot. Used for toy
// scenarios where the footprints would leave most switches idle.
struct SyntheticRequests {
  bool enabled = false;
  std::int64_t max_requests = 1000;
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  constellation::ConstellationConfig constellation;
  traffic::TrafficParams traffic;
  // Empty path means the built-in synthetic map for region_map_seed.
  std::filesystem::path region_map;
  std::uint64_t region_map_seed = 2022;
  SyntheticRequests synthetic;
  cost::DelayParams delay;
  cost::WeightSchedule weights;
  ga::GAParams ga;
  int controllers = 8;
  int slots = 1440;
  double slot_seconds = 60.0;
  UnixSeconds start_gmt = 1640995200;
  std::string strategy = "ga";
  int soft_leo_index = 0;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  bool emit_convergence = false;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Controller count the given strategy runs with; SoftLEO always uses one
  // per plane.
  int controllers_for(const std::string& strategy_name) const;
};

// Relative paths inside the document resolve against base_dir.
ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);
// Normalised echo of every field, as written to the run summary.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

// Builds slot contexts from a scenario: propagate, link, route, then
// synthesise requests.
class ScenarioSource : public ga::SlotSource {
 public:
  explicit ScenarioSource(const ScenarioConfig& cfg);

  int slot_count() const override { return slots_; }
  cost::SlotContext context(int slot) override;

  UnixSeconds slot_gmt(int slot) const;
  std::vector<constellation::SatState> states(int slot) const;
  traffic::RequestVector requests(int slot, std::span<const constellation::SatState> states) const;
  traffic::RequestVector requests(int slot) const { return requests(slot, states(slot)); }

  const traffic::RegionMap& region_map() const { return map_; }

 private:
  constellation::ConstellationConfig cfg_;
  traffic::TrafficParams traffic_;
  SyntheticRequests synthetic_;
  cost::DelayParams delay_;
  int slots_;
  double slot_seconds_;
  UnixSeconds start_;
  std::vector<constellation::OrbitalElements> elements_;
  traffic::RegionMap map_;
  std::optional<constellation::CoverageGrid> grid_;
};

std::unique_ptr<ga::Planner> make_planner(const ScenarioConfig& cfg, const std::string& strategy,
                                          ga::GenerationObserver observer = {});

struct StrategyRun {
  std::string strategy;
  ga::HorizonResult result;
};

// Runs one strategy over the whole horizon without touching the disk.
StrategyRun simulate(const ScenarioConfig& cfg, const std::string& strategy, ga::GenerationObserver observer = {},
                     const ga::SlotCallback& on_slot = {});

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kMetricsHeader =
    "slot,gmt,load_balance,avg_response_ms,migration_ms,reassignment_ms,sync_ms,objective,total_requests,"
    "generations_run,total_backlog,orphaned_backlog,backlog_spill";

std::string metrics_row(const ga::SlotRecord& rec);
void write_metrics_csv(std::ostream& out, const ga::HorizonResult& result);
nlohmann::json strategies_json(const StrategyRun& run);
nlohmann::json summary_json(const ScenarioConfig& cfg, const StrategyRun& run);

// `run`: metrics.csv, strategies.json, summary.json and, when enabled,
// convergence.csv under cfg.output_dir. Metrics rows are flushed per slot;
// a failure mid-run still writes a summary marked "aborted".
StrategyRun run(const ScenarioConfig& cfg);

// `compare`: compare.csv with one row per (slot, strategy), sorted by slot
// then strategy name, plus the empirical CDF of migration and reassignment
// cost within each strategy.
std::vector<StrategyRun> compare(const ScenarioConfig& cfg, const std::vector<std::string>& strategies);
void write_compare_csv(std::ostream& out, const std::vector<StrategyRun>& runs);

// `trace`: request_trace.csv with the per-slot request totals.
void write_request_trace(std::ostream& out, const ScenarioConfig& cfg);

struct OracleRow {
  int slot = 0;
  double ga_objective = 0.0;
  double oracle_objective = 0.0;
  std::int64_t candidates = 0;
};

// `oracle`: runs the GA horizon and, at every slot, the brute-force optimum
// of the same slot problem (same predecessor and backlogs).
std::vector<OracleRow> oracle(const ScenarioConfig& cfg);
void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

}  // namespace cpsa::harness
