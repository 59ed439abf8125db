// cpsa: command-line driver for controller placement scenarios.
//
// Exit status: 0 on success, 2 on configuration or input errors, 1 on any
// other failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpsa/error.hpp"
#include "cpsa/harness.hpp"
#include "cpsa/simd/kernels.hpp"
#include "cpsa/traffic.hpp"

namespace {

using cpsa::harness::ScenarioConfig;
using nlohmann::json;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> slots;
  std::optional<std::string> strategy;
  std::string out;
};

ScenarioConfig load(const std::string& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) throw cpsa::ConfigError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw cpsa::ConfigError(path + ": " + e.what());
  }
  if (!doc.is_object()) throw cpsa::ConfigError(path + ": expected a JSON object");
  if (o.seed) doc["seed"] = *o.seed;
  if (o.slots) doc["slots"] = *o.slots;
  if (o.strategy) doc["strategy"] = *o.strategy;
  ScenarioConfig cfg = cpsa::harness::parse_config(doc, std::filesystem::path(path).parent_path());
  if (!o.out.empty()) {
    cfg.output_dir = o.out;
  } else if (const char* env = std::getenv("CPSA_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }
  return cfg;
}

void add_overrides(CLI::App* cmd, Overrides& o, bool with_strategy) {
  cmd->add_option("--seed", o.seed, "RNG seed (overrides the config)");
  cmd->add_option("--slots", o.slots, "Number of slots (overrides the config)");
  if (with_strategy) cmd->add_option("--strategy", o.strategy, "ga, soft_leo, static_cluster or brute_force");
  cmd->add_option("--out", o.out, "Output directory (overrides CPSA_OUTPUT_DIR and the config)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Controller placement and switch assignment for LEO satellite networks"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;

  auto* run_cmd = app.add_subcommand("run", "Run one strategy over the horizon");
  run_cmd->add_option("config", config_path, "Scenario JSON")->required();
  add_overrides(run_cmd, ov, true);

  std::string strategies;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several strategies and merge their metrics");
  cmp_cmd->add_option("config", config_path, "Scenario JSON")->required();
  cmp_cmd->add_option("--strategies", strategies, "Comma-separated strategy list")->required();
  add_overrides(cmp_cmd, ov, false);

  auto* trace_cmd = app.add_subcommand("trace", "Write the per-slot request totals");
  trace_cmd->add_option("config", config_path, "Scenario JSON")->required();
  add_overrides(trace_cmd, ov, false);

  auto* oracle_cmd = app.add_subcommand("oracle", "Check the GA against exhaustive search on a tiny scenario");
  oracle_cmd->add_option("config", config_path, "Scenario JSON")->required();
  add_overrides(oracle_cmd, ov, false);

  std::uint64_t map_seed = 2022;
  std::string map_out = "sample_region_map.csv";
  auto* map_cmd = app.add_subcommand("genmap", "Write the synthetic 288-region user map");
  map_cmd->add_option("--seed", map_seed, "Map seed");
  map_cmd->add_option("--out", map_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*map_cmd) {
    std::ofstream out(map_out);
    if (!out) throw std::runtime_error("cannot write " + map_out);
    cpsa::traffic::write_region_map(out, cpsa::traffic::synthetic_region_map(map_seed));
    std::cout << "wrote " << map_out << '\n';
    return 0;
  }

  const ScenarioConfig cfg = load(config_path, ov);
  std::cerr << "simd: " << cpsa::simd::isa_name(cpsa::simd::active_isa()) << '\n';

  if (*run_cmd) {
    const auto result = cpsa::harness::run(cfg);
    const auto summary = cpsa::harness::summary_json(cfg, result);
    std::cout << cfg.strategy << ": " << result.result.slots.size() << " slots, total objective "
              << summary["totals"]["objective"].get<double>() << ", artifacts in " << cfg.output_dir.string() << '\n';
    return 0;
  }
  if (*cmp_cmd) {
    const auto runs = cpsa::harness::compare(cfg, split_list(strategies));
    for (const auto& r : runs) {
      double total = 0.0;
      for (const auto& rec : r.result.slots) total += rec.cost.objective;
      std::cout << r.strategy << ": total objective " << total << '\n';
    }
    std::cout << "wrote " << (cfg.output_dir / "compare.csv").string() << '\n';
    return 0;
  }
  if (*trace_cmd) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = cfg.output_dir / "request_trace.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    cpsa::harness::write_request_trace(out, cfg);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
  }
  if (*oracle_cmd) {
    const auto rows = cpsa::harness::oracle(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = cfg.output_dir / "oracle.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    cpsa::harness::write_oracle_csv(out, rows);
    int exact = 0;
    for (const auto& r : rows) exact += r.ga_objective == r.oracle_objective;
    std::cout << "GA matched the optimum in " << exact << "/" << rows.size() << " slots; wrote " << path.string()
              << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const cpsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cpsa::IngestionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
