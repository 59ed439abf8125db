#pragma once

// Reference strategies scored by the same cost pipeline as the GA, and an
// exhaustive oracle for tiny instances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpsa/constellation.hpp"
#include "cpsa/cost.hpp"
#include "cpsa/horizon.hpp"

namespace cpsa::baselines {

// One controller per orbital plane at the same in-plane index; every
// satellite is managed by its own plane's controller. Never changes.
cost::Strategy soft_leo(const constellation::ConstellationConfig& cfg, int in_orbit_index);

// Controller for each switch: nearest by shortest-path length, ties to the
// lowest satellite index.
cost::Strategy nearest_assignment(const std::vector<int>& controllers, const constellation::DistanceMatrix& dm);

inline constexpr double kBruteForceLimit = 1e7;

struct OracleResult {
  cost::Strategy strategy;
  cost::CostBreakdown cost;
  std::int64_t candidates = 0;
};

// C(N, K) * K^N, the number of strategies brute_force() enumerates.
double brute_force_candidates(int n, int k);

// Exhaustive minimum of the weighted objective. Candidates are visited in
// lexicographic order (controller combination, then assignment) and the
// first minimum wins. Throws OracleSizeError above kBruteForceLimit.
OracleResult brute_force(const cost::SlotContext& ctx, const cost::Strategy* previous,
                         const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k);

class SoftLeoPlanner : public ga::Planner {
 public:
  SoftLeoPlanner(constellation::ConstellationConfig cfg, int in_orbit_index);
  std::string name() const override { return "soft_leo"; }
  ga::PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                      const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) override;

 private:
  cost::Strategy strategy_;
};

// Placement frozen at the first slot's clustering medoids, assignment
// recomputed each slot by nearest controller.
class StaticClusterPlanner : public ga::Planner {
 public:
  StaticClusterPlanner(int cluster_max_iters, std::uint64_t seed);
  std::string name() const override { return "static_cluster"; }
  ga::PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                      const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) override;

 private:
  int max_iters_;
  std::uint64_t seed_;
  std::optional<std::vector<int>> placement_;
};

class BruteForcePlanner : public ga::Planner {
 public:
  std::string name() const override { return "brute_force"; }
  ga::PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                      const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) override;
};

}  // namespace cpsa::baselines
