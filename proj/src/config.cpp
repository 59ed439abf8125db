#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "cpsa/error.hpp"
#include "cpsa/harness.hpp"

namespace cpsa::harness {
namespace {

using nlohmann::json;

// Typed reads from one JSON object with errors that carry the field path.
// finish() rejects keys nobody asked for, which catches typos.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void get(const std::string& key, int& out) { read_integer(key, out); }
  void get(const std::string& key, std::int64_t& out) { read_integer(key, out); }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        throw ConfigError(field(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config: " : path_ + ": "; }

  template <class T>
  void read_integer(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
      const auto raw = v->get<std::int64_t>();
      if (raw < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
          raw > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
        throw ConfigError(field(key) + ": out of range");
      }
      out = static_cast<T>(raw);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

UnixSeconds read_gmt(Section& s, const std::string& key, UnixSeconds fallback) {
  std::string text;
  s.get(key, text);
  if (text.empty()) return fallback;
  try {
    return parse_gmt(text);
  } catch (const ConfigError& e) {
    throw ConfigError(s.field(key) + ": " + e.what());
  }
}

void parse_constellation(const json& j, constellation::ConstellationConfig& c) {
  Section s(j, "constellation");
  s.get("num_planes", c.num_planes);
  s.get("sats_per_plane", c.sats_per_plane);
  s.get("altitude_km", c.altitude_km);
  s.get("inclination_deg", c.inclination_deg);
  s.get("half_view_angle_deg", c.half_view_angle_deg);
  s.get("phasing_factor", c.phasing_factor);
  c.epoch_gmt = read_gmt(s, "epoch_gmt", c.epoch_gmt);
  s.get("earth_radius_km", c.earth_radius_km);
  s.get("orbit_reference_radius_km", c.orbit_reference_radius_km);
  s.get("coverage_resolution_deg", c.coverage_resolution_deg);
  s.finish();
}

void parse_traffic(const json& j, ScenarioConfig& cfg, const std::filesystem::path& base_dir) {
  Section s(j, "traffic");
  s.get("eta1", cfg.traffic.eta1);
  std::string rounding = cfg.traffic.rounding == traffic::Rounding::floor ? "floor" : "round";
  s.get("rounding", rounding);
  if (rounding == "floor") {
    cfg.traffic.rounding = traffic::Rounding::floor;
  } else if (rounding == "round") {
    cfg.traffic.rounding = traffic::Rounding::round;
  } else {
    throw ConfigError("traffic.rounding: expected \"floor\" or \"round\"");
  }
  std::string map_path;
  s.get("region_map", map_path);
  if (!map_path.empty()) {
    std::filesystem::path p(map_path);
    cfg.region_map = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  s.get("region_map_seed", cfg.region_map_seed);
  if (const json* syn = s.find("synthetic_requests")) {
    Section ss(*syn, "traffic.synthetic_requests");
    cfg.synthetic.enabled = true;
    ss.get("max_requests", cfg.synthetic.max_requests);
    ss.get("seed", cfg.synthetic.seed);
    ss.finish();
  }
  s.finish();
}

void parse_delay(const json& j, cost::DelayParams& d) {
  Section s(j, "delay");
  s.get("lambda_per_s", d.lambda_per_s);
  if (const json* o = s.find("lambda_overrides")) {
    if (!o->is_object()) throw ConfigError("delay.lambda_overrides: expected an object of satellite -> rate");
    for (auto it = o->begin(); it != o->end(); ++it) {
      const std::string path = "delay.lambda_overrides." + it.key();
      int sat = 0;
      try {
        std::size_t used = 0;
        sat = std::stoi(it.key(), &used);
        if (used != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(path + ": key must be a satellite index");
      }
      if (!it->is_number()) throw ConfigError(path + ": expected a number");
      d.lambda_overrides[sat] = it->get<double>();
    }
  }
  s.get("rho_ms", d.rho_ms);
  s.get("transmission_ms", d.transmission_ms);
  s.get("forwarding_ms", d.forwarding_ms);
  s.get("processing_ms", d.processing_ms);
  s.get("light_speed_km_per_ms", d.light_speed_km_per_ms);
  s.get("data_store_mb", d.data_store_mb);
  s.get("migration_link_gbps", d.migration_link_gbps);
  s.finish();
}

void read_weight_keys(Section& s, cost::Weights& w) {
  double w1 = w.load_balance, w2 = w.response;
  s.get("w1", w1);
  s.get("w2", w2);
  w.load_balance = w1;
  w.response = w2;
  if (s.has("w3")) {
    double w3 = 0.0;
    s.get("w3", w3);
    w.migration = w.reassignment = w.sync = w3;
  }
  s.get("load_balance", w.load_balance);
  s.get("response", w.response);
  s.get("migration", w.migration);
  s.get("reassignment", w.reassignment);
  s.get("sync", w.sync);
}

void parse_weights(const json& j, cost::Weights& w) {
  Section s(j, "weights");
  read_weight_keys(s, w);
  s.finish();
}

void parse_schedule(const json& j, cost::WeightSchedule& sched) {
  if (!j.is_array()) throw ConfigError("weight_schedule: expected an array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    Section s(j[i], "weight_schedule[" + std::to_string(i) + "]");
    int from = 0;
    if (!s.has("from_slot")) throw ConfigError(s.field("from_slot") + ": required");
    s.get("from_slot", from);
    if (from < 1) throw ConfigError(s.field("from_slot") + ": must be >= 1");
    cost::Weights w = sched.base;
    read_weight_keys(s, w);
    s.finish();
    sched.changes.emplace_back(from, w);
  }
  std::stable_sort(sched.changes.begin(), sched.changes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

void parse_ga(const json& j, ga::GAParams& g) {
  Section s(j, "ga");
  s.get("population_size", g.population_size);
  s.get("max_generations", g.max_generations);
  s.get("stall_limit", g.stall_limit);
  s.get("stall_epsilon", g.stall_epsilon);
  s.get("crossover_prob_placement", g.crossover_prob_placement);
  s.get("crossover_prob_assignment", g.crossover_prob_assignment);
  s.get("mutation_prob_placement", g.mutation_prob_placement);
  s.get("mutation_rate_assignment", g.mutation_rate_assignment);
  s.get("breeder_shrink", g.breeder_shrink);
  s.get("breeder_gradient", g.breeder_gradient);
  s.get("tournament_size", g.tournament_size);
  s.get("prior_pool_size", g.prior_pool_size);
  s.get("replacement_mutation_rate", g.replacement_mutation_rate);
  s.get("cluster_max_iters", g.cluster_max_iters);
  s.get("use_prior", g.use_prior);
  s.finish();
}

std::string rounding_name(traffic::Rounding r) { return r == traffic::Rounding::floor ? "floor" : "round"; }

json weights_to_json(const cost::Weights& w) {
  return {{"load_balance", w.load_balance},
          {"response", w.response},
          {"migration", w.migration},
          {"reassignment", w.reassignment},
          {"sync", w.sync}};
}

}  // namespace

void ScenarioConfig::validate() const {
  constellation.validate();
  traffic.validate();
  delay.validate();
  weights.base.validate();
  for (const auto& [slot, w] : weights.changes) w.validate();
  ga.validate();
  if (slots < 1) throw ConfigError("slots: must be >= 1");
  if (!(slot_seconds > 0.0)) throw ConfigError("slot_seconds: must be > 0");
  if (controllers < 1 || controllers > constellation.size()) {
    throw ConfigError("controllers: must lie in 1.." + std::to_string(constellation.size()));
  }
  if (std::find(kStrategies.begin(), kStrategies.end(), strategy) == kStrategies.end()) {
    throw ConfigError("strategy: unknown strategy \"" + strategy + "\"");
  }
  if (soft_leo_index < 0 || soft_leo_index >= constellation.sats_per_plane) {
    throw ConfigError("soft_leo_index: must lie in 0.." + std::to_string(constellation.sats_per_plane - 1));
  }
  if (synthetic.enabled && synthetic.max_requests < 0) {
    throw ConfigError("traffic.synthetic_requests.max_requests: must be >= 0");
  }
}

int ScenarioConfig::controllers_for(const std::string& strategy_name) const {
  return strategy_name == "soft_leo" ? constellation.num_planes : controllers;
}

ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  Section s(doc, "");
  if (const json* j = s.find("constellation")) parse_constellation(*j, cfg.constellation);
  if (const json* j = s.find("traffic")) parse_traffic(*j, cfg, base_dir);
  if (const json* j = s.find("delay")) parse_delay(*j, cfg.delay);
  if (const json* j = s.find("weights")) parse_weights(*j, cfg.weights.base);
  if (const json* j = s.find("weight_schedule")) parse_schedule(*j, cfg.weights);
  if (const json* j = s.find("ga")) parse_ga(*j, cfg.ga);
  s.get("controllers", cfg.controllers);
  s.get("slots", cfg.slots);
  s.get("slot_seconds", cfg.slot_seconds);
  cfg.start_gmt = read_gmt(s, "start_gmt", cfg.start_gmt);
  s.get("strategy", cfg.strategy);
  s.get("soft_leo_index", cfg.soft_leo_index);
  std::string out;
  s.get("output_dir", out);
  if (!out.empty()) {
    std::filesystem::path p(out);
    cfg.output_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  s.get("seed", cfg.seed);
  s.get("emit_convergence", cfg.emit_convergence);
  s.finish();
  cfg.ga.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  const auto& c = cfg.constellation;
  json j;
  j["constellation"] = {{"num_planes", c.num_planes},
                        {"sats_per_plane", c.sats_per_plane},
                        {"altitude_km", c.altitude_km},
                        {"inclination_deg", c.inclination_deg},
                        {"half_view_angle_deg", c.half_view_angle_deg},
                        {"phasing_factor", c.phasing_factor},
                        {"epoch_gmt", format_gmt(c.epoch_gmt)},
                        {"earth_radius_km", c.earth_radius_km},
                        {"orbit_reference_radius_km", c.orbit_reference_radius_km},
                        {"coverage_resolution_deg", c.coverage_resolution_deg}};
  json t = {{"eta1", cfg.traffic.eta1},
            {"rounding", rounding_name(cfg.traffic.rounding)},
            {"region_map", cfg.region_map.generic_string()},
            {"region_map_seed", cfg.region_map_seed}};
  if (cfg.synthetic.enabled) {
    t["synthetic_requests"] = {{"max_requests", cfg.synthetic.max_requests}, {"seed", cfg.synthetic.seed}};
  }
  j["traffic"] = t;
  json overrides = json::object();
  for (const auto& [sat, rate] : cfg.delay.lambda_overrides) overrides[std::to_string(sat)] = rate;
  j["delay"] = {{"lambda_per_s", cfg.delay.lambda_per_s},
                {"lambda_overrides", overrides},
                {"rho_ms", cfg.delay.rho_ms},
                {"transmission_ms", cfg.delay.transmission_ms},
                {"forwarding_ms", cfg.delay.forwarding_ms},
                {"processing_ms", cfg.delay.processing_ms},
                {"light_speed_km_per_ms", cfg.delay.light_speed_km_per_ms},
                {"data_store_mb", cfg.delay.data_store_mb},
                {"migration_link_gbps", cfg.delay.migration_link_gbps}};
  j["weights"] = weights_to_json(cfg.weights.base);
  json sched = json::array();
  for (const auto& [slot, w] : cfg.weights.changes) {
    json e = weights_to_json(w);
    e["from_slot"] = slot;
    sched.push_back(e);
  }
  j["weight_schedule"] = sched;
  const auto& g = cfg.ga;
  j["ga"] = {{"population_size", g.population_size},
             {"max_generations", g.max_generations},
             {"stall_limit", g.stall_limit},
             {"stall_epsilon", g.stall_epsilon},
             {"crossover_prob_placement", g.crossover_prob_placement},
             {"crossover_prob_assignment", g.crossover_prob_assignment},
             {"mutation_prob_placement", g.mutation_prob_placement},
             {"mutation_rate_assignment", g.mutation_rate_assignment},
             {"breeder_shrink", g.breeder_shrink},
             {"breeder_gradient", g.breeder_gradient},
             {"tournament_size", g.tournament_size},
             {"prior_pool_size", g.prior_pool_size},
             {"replacement_mutation_rate", g.replacement_mutation_rate},
             {"cluster_max_iters", g.cluster_max_iters},
             {"use_prior", g.use_prior}};
  j["controllers"] = cfg.controllers;
  j["slots"] = cfg.slots;
  j["slot_seconds"] = cfg.slot_seconds;
  j["start_gmt"] = format_gmt(cfg.start_gmt);
  j["strategy"] = cfg.strategy;
  j["soft_leo_index"] = cfg.soft_leo_index;
  j["output_dir"] = cfg.output_dir.generic_string();
  j["seed"] = cfg.seed;
  j["emit_convergence"] = cfg.emit_convergence;
  return j;
}

}  // namespace cpsa::harness
