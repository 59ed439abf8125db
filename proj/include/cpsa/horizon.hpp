#pragma once

// Sequential slot loop shared by every planning strategy: update controller
// backlogs from the previous slot, build the slot context, plan, score.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpsa/cost.hpp"
#include "cpsa/ga.hpp"

namespace cpsa::ga {

// Produces the frozen network state of slot t (1-based).
class SlotSource {
 public:
  virtual ~SlotSource() = default;
  virtual int slot_count() const = 0;
  virtual cost::SlotContext context(int slot) = 0;
};

struct PlanResult {
  cost::Strategy strategy;
  int generations_run = 0;
  int convergence_generation = 0;
  std::vector<double> convergence_trace;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;
  // `previous` is null in the first slot.
  virtual PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                          const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) = 0;
};

struct SlotRecord {
  int slot = 0;
  UnixSeconds gmt = 0;
  cost::Strategy strategy;
  cost::CostBreakdown cost;
  std::int64_t total_requests = 0;
  std::int64_t entering_backlog = 0;  // sum of b_k at slot start
  std::int64_t orphaned_backlog = 0;  // dropped at this slot's start
  int backlog_spill = 0;
  int generations_run = 0;
  int convergence_generation = 0;
  std::vector<double> convergence_trace;
};

struct HorizonResult {
  std::vector<SlotRecord> slots;
  std::int64_t total_arrivals = 0;
  std::int64_t total_processed = 0;
  std::int64_t total_orphaned = 0;
  std::int64_t final_backlog = 0;

  bool conserved() const { return total_arrivals == total_processed + final_backlog + total_orphaned; }
};

using SlotCallback = std::function<void(const SlotRecord&)>;

// Runs slots 1..source.slot_count() in order. on_slot fires after each slot
// so callers can persist partial results.
HorizonResult run_horizon(SlotSource& source, Planner& planner, const cost::WeightSchedule& weights, int k,
                          const SlotCallback& on_slot = {});

// Prior-population GA chained across slots. The first slot is seeded with
// the clustering individual; later slots with the previous best plus the
// elite sample of the previous final generation.
class PriorPopulationPlanner : public Planner {
 public:
  explicit PriorPopulationPlanner(GAParams params, GenerationObserver observer = {});

  std::string name() const override { return "ga"; }
  PlanResult plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                  const cost::ControllerBacklogs& backlogs, const cost::Weights& weights, int k) override;

  const std::optional<SlotSolution>& last_solution() const { return last_; }

 private:
  GAParams params_;
  GenerationObserver observer_;
  std::vector<Chromosome> elite_;
  std::optional<SlotSolution> last_;
};

}  // namespace cpsa::ga
