#include "cpsa/baselines.hpp"

#include <cmath>
#include <string>

#include "cpsa/error.hpp"
#include "cpsa/ga.hpp"

namespace cpsa::baselines {

cost::Strategy soft_leo(const constellation::ConstellationConfig& cfg, int in_orbit_index) {
  if (in_orbit_index < 0 || in_orbit_index >= cfg.sats_per_plane) {
    throw ConfigError("soft_leo_index: must lie in 0.." + std::to_string(cfg.sats_per_plane - 1));
  }
  cost::Strategy s;
  for (int p = 0; p < cfg.num_planes; ++p) s.controllers.push_back(p * cfg.sats_per_plane + in_orbit_index);
  for (int sat = 0; sat < cfg.size(); ++sat) {
    s.assignment.push_back(sat / cfg.sats_per_plane * cfg.sats_per_plane + in_orbit_index);
  }
  return s;
}

cost::Strategy nearest_assignment(const std::vector<int>& controllers, const constellation::DistanceMatrix& dm) {
  cost::Strategy s;
  s.controllers = controllers;
  for (int sw = 0; sw < dm.n; ++sw) {
    int best = controllers.front();
    for (int c : controllers) {
      const double dc = dm.at(sw, c), db = dm.at(sw, best);
      if (dc < db || (dc == db && c < best)) best = c;
    }
    s.assignment.push_back(best);
  }
  return s;
}

double brute_force_candidates(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double combos = 1.0;
  for (int i = 1; i <= k; ++i) combos = combos * (n - k + i) / i;
  return std::round(combos) * std::pow(static_cast<double>(k), n);
}

OracleResult brute_force(const cost::SlotContext& ctx, const cost::Strategy* previous,
                         const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) {
  const int n = ctx.size();
  if (k < 1 || k > n) throw ConfigError("brute_force: K must lie in 1..N");
  const double candidates = brute_force_candidates(n, k);
  if (candidates > kBruteForceLimit) {
    throw OracleSizeError("brute_force: " + std::to_string(static_cast<long long>(candidates)) +
                          " candidates exceed the limit of 10^7 (N=" + std::to_string(n) + ", K=" + std::to_string(k) +
                          ")");
  }
  const cost::Evaluator evaluator(ctx, previous, backlogs, weights);

  OracleResult best;
  bool have = false;
  std::vector<int> combo(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = i;

  cost::Strategy s;
  s.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  while (true) {
    s.controllers = combo;
    std::fill(digits.begin(), digits.end(), 0);
    while (true) {
      for (int sw = 0; sw < n; ++sw) {
        s.assignment[static_cast<std::size_t>(sw)] = combo[static_cast<std::size_t>(digits[static_cast<std::size_t>(sw)])];
      }
      const auto c = evaluator.evaluate(s);
      ++best.candidates;
      if (!have || c.objective < best.cost.objective) {
        best.strategy = s;
        best.cost = c;
        have = true;
      }
      // Odometer with switch 0 as the most significant digit.
      int pos = n - 1;
      while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == k) digits[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
    int i = k - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

SoftLeoPlanner::SoftLeoPlanner(constellation::ConstellationConfig cfg, int in_orbit_index)
    : strategy_(soft_leo(cfg, in_orbit_index)) {}

ga::PlanResult SoftLeoPlanner::plan(const cost::SlotContext& ctx, const cost::Strategy*, const cost::ControllerBacklogs&,
                                    const cost::Weights&, int k) {
  if (static_cast<int>(strategy_.controllers.size()) != k) {
    throw ConfigError("soft_leo: controller count is fixed to the number of planes (" +
                      std::to_string(strategy_.controllers.size()) + "), got K=" + std::to_string(k));
  }
  if (static_cast<int>(strategy_.assignment.size()) != ctx.size()) {
    throw ConfigError("soft_leo: constellation size does not match the slot");
  }
  return {strategy_, 0, 0, {}};
}

StaticClusterPlanner::StaticClusterPlanner(int cluster_max_iters, std::uint64_t seed)
    : max_iters_(cluster_max_iters), seed_(seed) {}

ga::PlanResult StaticClusterPlanner::plan(const cost::SlotContext& ctx, const cost::Strategy*,
                                          const cost::ControllerBacklogs&, const cost::Weights&, int k) {
  if (!placement_) {
    ga::Rng rng(ga::slot_seed(seed_, ctx.slot) ^ 0xC1u);
    placement_ = ga::cluster_seed(k, ctx.dm, max_iters_, rng).placement;
  }
  return {nearest_assignment(*placement_, ctx.dm), 0, 0, {}};
}

ga::PlanResult BruteForcePlanner::plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                                       const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) {
  return {brute_force(ctx, previous, backlogs, weights, k).strategy, 0, 0, {}};
}

}  // namespace cpsa::baselines
