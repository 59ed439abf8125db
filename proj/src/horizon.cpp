#include "cpsa/horizon.hpp"

#include <numeric>

namespace cpsa::ga {

HorizonResult run_horizon(SlotSource& source, Planner& planner, const cost::WeightSchedule& weights, int k,
                          const SlotCallback& on_slot) {
  HorizonResult result;
  cost::ControllerBacklogs backlogs;
  std::optional<cost::Strategy> previous;
  std::vector<std::int64_t> prev_requests;
  cost::DelayParams prev_delay;
  double prev_slot_seconds = 0.0;

  auto advance = [&](std::int64_t& orphaned) {
    auto update = cost::update_backlogs(*previous, prev_requests, backlogs, prev_delay, prev_slot_seconds);
    result.total_arrivals += update.arrivals;
    result.total_processed += update.processed;
    result.total_orphaned += update.orphaned;
    orphaned = update.orphaned;
    backlogs = std::move(update.next);
  };

  for (int t = 1; t <= source.slot_count(); ++t) {
    SlotRecord rec;
    rec.slot = t;
    if (previous) advance(rec.orphaned_backlog);

    const cost::SlotContext ctx = source.context(t);
    const cost::Weights& w = weights.at(t);
    PlanResult plan = planner.plan(ctx, previous ? &*previous : nullptr, backlogs, w, k);

    rec.gmt = ctx.gmt;
    rec.cost = cost::objective(ctx, plan.strategy, previous ? &*previous : nullptr, backlogs, w, k);
    rec.strategy = std::move(plan.strategy);
    rec.total_requests = std::accumulate(ctx.requests.begin(), ctx.requests.end(), std::int64_t{0});
    rec.entering_backlog = backlogs.total();
    rec.backlog_spill = cost::backlog_spill_count(rec.strategy, backlogs, ctx.delay, ctx.slot_seconds);
    rec.generations_run = plan.generations_run;
    rec.convergence_generation = plan.convergence_generation;
    rec.convergence_trace = std::move(plan.convergence_trace);

    previous = rec.strategy;
    prev_requests = ctx.requests;
    prev_delay = ctx.delay;
    prev_slot_seconds = ctx.slot_seconds;
    if (on_slot) on_slot(rec);
    result.slots.push_back(std::move(rec));
  }
  if (previous) {
    std::int64_t orphaned = 0;
    advance(orphaned);
    result.final_backlog = backlogs.total();
  }
  return result;
}

PriorPopulationPlanner::PriorPopulationPlanner(GAParams params, GenerationObserver observer)
    : params_(params), observer_(std::move(observer)) {
  params_.validate();
}

PlanResult PriorPopulationPlanner::plan(const cost::SlotContext& ctx, const cost::Strategy* previous,
                                        const cost::ControllerBacklogs& backlogs, const cost::Weights& weights,
                                        int k) {
  const std::uint64_t seed = slot_seed(params_.seed, ctx.slot);
  std::vector<Chromosome> prior;
  if (params_.use_prior) {
    if (previous == nullptr) {
      Rng rng(seed ^ 0xC1u);
      prior.push_back(cluster_seed(k, ctx.dm, params_.cluster_max_iters, rng));
    } else {
      prior.push_back(encode(*previous));
      prior.insert(prior.end(), elite_.begin(), elite_.end());
    }
  }
  SlotSolution sol = evolve_slot(ctx, previous, prior, backlogs, weights, k, params_, seed, observer_);
  elite_ = sol.elite_pool;

  PlanResult out;
  out.strategy = sol.best_strategy;
  out.generations_run = sol.generations_run;
  out.convergence_generation = sol.convergence_generation;
  out.convergence_trace = sol.convergence_trace;
  last_ = std::move(sol);
  return out;
}

}  // namespace cpsa::ga
