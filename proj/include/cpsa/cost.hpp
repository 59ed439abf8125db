#pragma once

// Per-slot cost model for joint controller placement and switch assignment:
// load balance, request-weighted response delay, controller migration,
// switch reassignment and leaderless synchronisation, plus the controller
// backlog recursion that links consecutive slots.
//
// Delays are in milliseconds, distances in kilometres, requests are counts.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpsa/constellation.hpp"
#include "cpsa/gmt.hpp"

namespace cpsa::cost {

// A controller set plus, for every switch, the satellite that controls it.
struct Strategy {
  std::vector<int> controllers;
  std::vector<int> assignment;

  bool operator==(const Strategy&) const = default;
};

// Unprocessed requests per controller satellite, carried into the next slot.
struct ControllerBacklogs {
  std::map<int, std::int64_t> backlog;

  std::int64_t at(int satellite) const;
  std::int64_t total() const;
};

struct DelayParams {
  double lambda_per_s = 4000.0;
  std::map<int, double> lambda_overrides;  // satellite -> requests/s
  double rho_ms = 0.09;
  double transmission_ms = 0.1;
  double forwarding_ms = 0.1;
  double processing_ms = 0.5;
  double light_speed_km_per_ms = 299.792458;
  double data_store_mb = 100.0;
  double migration_link_gbps = 1.0;

  double lambda_for(int satellite) const;
  // Requests a controller can finish within one slot, floor(lambda * dt).
  std::int64_t capacity(int satellite, double slot_seconds) const;
  // Data-store transfer time D / R_s.
  double transfer_ms() const;
  void validate() const;
};

struct Weights {
  double load_balance = 0.001;
  double response = 1.0;
  double migration = 0.002;
  double reassignment = 0.002;
  double sync = 0.002;

  // Single management weight shared by migration, reassignment and sync.
  static Weights combined(double w1, double w2, double w3);
  void validate() const;
};

// Weights may change over the horizon; `changes` holds (first slot, weights)
// pairs sorted by slot.
struct WeightSchedule {
  Weights base;
  std::vector<std::pair<int, Weights>> changes;

  const Weights& at(int slot) const;
};

struct CostBreakdown {
  double load_balance = 0.0;
  double avg_response_ms = 0.0;
  double migration_ms = 0.0;
  double reassignment_ms = 0.0;
  double sync_ms = 0.0;
  double objective = 0.0;

  double management_ms() const { return migration_ms + reassignment_ms + sync_ms; }
};

// Everything the cost model needs to know about one slot. Build with
// make_slot_context(), which precomputes the per-pair path delay terms.
struct SlotContext {
  int slot = 1;
  UnixSeconds gmt = 0;
  double slot_seconds = 60.0;
  constellation::DistanceMatrix dm;
  std::vector<std::int64_t> requests;
  DelayParams delay;

  // n x n, row = switch, column = controller.
  std::vector<double> propagation_ms;  // shortest-path length / light speed
  std::vector<double> path_core_ms;    // bracketed one-way term of the response delay
  std::vector<double> transit_ms;      // request transit subtracted from the backlog wait

  int size() const { return dm.n; }
  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * static_cast<std::size_t>(dm.n) + static_cast<std::size_t>(b); }
};

SlotContext make_slot_context(int slot, UnixSeconds gmt, double slot_seconds, constellation::DistanceMatrix dm,
                              std::vector<std::int64_t> requests, DelayParams delay);

struct Violation {
  int constraint = 0;  // 16..20
  std::string detail;
};

// Every violated placement/assignment constraint:
//   16 controller index outside the satellite range
//   17 switch assigned outside the satellite range
//   18 switch assigned to a satellite that is not an active controller
//   19 controller count differs from K (including duplicates)
//   20 assignment does not give every switch exactly one controller
std::vector<Violation> validate(const Strategy& strategy, int n, int k);

double queuing_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs,
                        int sw, int controller);
double response_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs,
                         int sw, int controller);
// Request-weighted mean response delay; 0 when the slot carries no requests.
double avg_response_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs);

double migration_cost_ms(const SlotContext& ctx, const Strategy& current, const Strategy* previous);
double reassignment_cost_ms(const SlotContext& ctx, const Strategy& current, const Strategy* previous);
double synchronization_cost_ms(const SlotContext& ctx, const Strategy& strategy);
// Population standard deviation of per-controller request loads.
double load_balance_factor(const Strategy& strategy, std::span<const std::int64_t> requests);

struct BacklogUpdate {
  ControllerBacklogs next;
  std::int64_t arrivals = 0;
  std::int64_t processed = 0;
  // Backlog held by controllers that were dropped from the set; lost.
  std::int64_t orphaned = 0;
};

// Backlog recursion at the start of a slot from the previous slot's
// strategy, requests and entering backlogs. Controllers that were newly
// activated in the previous slot started from zero.
BacklogUpdate update_backlogs(const Strategy& prev_strategy, std::span<const std::int64_t> prev_requests,
                              const ControllerBacklogs& prev_backlogs, const DelayParams& params,
                              double slot_seconds);

// Controllers of `strategy` whose backlog alone needs longer than a slot.
int backlog_spill_count(const Strategy& strategy, const ControllerBacklogs& backlogs, const DelayParams& params,
                        double slot_seconds);

// Fast evaluator bound to one slot, predecessor strategy, backlogs and
// weights. evaluate() skips validation and is safe to call concurrently.
// Results depend only on the controller set and per-switch assignment, not
// on controller order.
class Evaluator {
 public:
  Evaluator(const SlotContext& ctx, const Strategy* previous, const ControllerBacklogs& backlogs,
            const Weights& weights);

  CostBreakdown evaluate(const Strategy& strategy) const;
  double objective(const Strategy& strategy) const { return evaluate(strategy).objective; }

  const SlotContext& context() const { return *ctx_; }

 private:
  const SlotContext* ctx_;
  Weights weights_;
  bool has_previous_;
  std::vector<char> prev_controller_;   // per satellite
  std::vector<int> prev_controllers_;
  std::vector<int> prev_assignment_;
  std::vector<double> backlog_wait_ms_;  // per satellite, b / lambda
  std::int64_t total_requests_;
};

// Validates, then evaluates. Throws ValidationError listing violations.
CostBreakdown objective(const SlotContext& ctx, const Strategy& current, const Strategy* previous,
                        const ControllerBacklogs& backlogs, const Weights& weights, int k);

}  // namespace cpsa::cost
