#include "cpsa/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "cpsa/error.hpp"

namespace cpsa::cost {

std::int64_t ControllerBacklogs::at(int satellite) const {
  const auto it = backlog.find(satellite);
  return it == backlog.end() ? 0 : it->second;
}

std::int64_t ControllerBacklogs::total() const {
  std::int64_t sum = 0;
  for (const auto& [sat, b] : backlog) sum += b;
  return sum;
}

double DelayParams::lambda_for(int satellite) const {
  const auto it = lambda_overrides.find(satellite);
  return it == lambda_overrides.end() ? lambda_per_s : it->second;
}

std::int64_t DelayParams::capacity(int satellite, double slot_seconds) const {
  return static_cast<std::int64_t>(std::floor(lambda_for(satellite) * slot_seconds + 1e-9));
}

double DelayParams::transfer_ms() const {
  // MB -> bits over Gbit/s, in ms.
  return data_store_mb * 8e6 / (migration_link_gbps * 1e9) * 1000.0;
}

void DelayParams::validate() const {
  auto nonneg = [](double v, const char* field) {
    if (!(v >= 0.0)) throw ConfigError(std::string("delay.") + field + ": must be >= 0");
  };
  if (!(lambda_per_s > 0.0)) throw ConfigError("delay.lambda_per_s: must be > 0");
  for (const auto& [sat, l] : lambda_overrides) {
    if (!(l > 0.0)) throw ConfigError("delay.lambda_overrides: capacity of satellite " + std::to_string(sat) + " must be > 0");
  }
  nonneg(rho_ms, "rho_ms");
  nonneg(transmission_ms, "transmission_ms");
  nonneg(forwarding_ms, "forwarding_ms");
  nonneg(processing_ms, "processing_ms");
  nonneg(data_store_mb, "data_store_mb");
  if (!(light_speed_km_per_ms > 0.0)) throw ConfigError("delay.light_speed_km_per_ms: must be > 0");
  if (!(migration_link_gbps > 0.0)) throw ConfigError("delay.migration_link_gbps: must be > 0");
}

Weights Weights::combined(double w1, double w2, double w3) { return {w1, w2, w3, w3, w3}; }

const Weights& WeightSchedule::at(int slot) const {
  const Weights* w = &base;
  for (const auto& [from, weights] : changes) {
    if (from <= slot) w = &weights;
  }
  return *w;
}

void Weights::validate() const {
  for (double w : {load_balance, response, migration, reassignment, sync}) {
    if (!(w >= 0.0)) throw ConfigError("weights: every weight must be >= 0");
  }
  if (load_balance + response + migration + reassignment + sync <= 0.0) {
    throw ConfigError("weights: at least one weight must be positive");
  }
}

SlotContext make_slot_context(int slot, UnixSeconds gmt, double slot_seconds, constellation::DistanceMatrix dm,
                              std::vector<std::int64_t> requests, DelayParams delay) {
  delay.validate();
  if (static_cast<int>(requests.size()) != dm.n) {
    throw ConfigError("slot context: request vector has " + std::to_string(requests.size()) + " entries for " +
                      std::to_string(dm.n) + " satellites");
  }
  SlotContext ctx;
  ctx.slot = slot;
  ctx.gmt = gmt;
  ctx.slot_seconds = slot_seconds;
  ctx.dm = std::move(dm);
  ctx.requests = std::move(requests);
  ctx.delay = std::move(delay);

  const int n = ctx.dm.n;
  const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  ctx.propagation_ms.resize(cells);
  ctx.path_core_ms.resize(cells);
  ctx.transit_ms.resize(cells);
  const auto& d = ctx.delay;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const std::size_t i = ctx.idx(a, b);
      // A path of h links has L = h - 1 intermediate switches; a switch that
      // is its own controller is treated as L = 0 over a zero-length link.
      const int links = ctx.dm.hop_count(a, b);
      const int intermediates = std::max(links - 1, 0);
      const double prop = ctx.dm.at(a, b) / d.light_speed_km_per_ms;
      ctx.propagation_ms[i] = prop;
      ctx.path_core_ms[i] = prop + (intermediates + 1) * d.processing_ms + intermediates * d.forwarding_ms;
      ctx.transit_ms[i] = d.transmission_ms + prop + intermediates * (d.processing_ms + d.forwarding_ms);
    }
  }
  return ctx;
}

std::vector<Violation> validate(const Strategy& strategy, int n, int k) {
  std::vector<Violation> out;
  std::set<int> active;
  for (int c : strategy.controllers) {
    if (c < 0 || c >= n) {
      out.push_back({16, "controller index " + std::to_string(c) + " outside 0.." + std::to_string(n - 1)});
    } else {
      active.insert(c);
    }
  }
  if (active.size() != strategy.controllers.size() || static_cast<int>(strategy.controllers.size()) != k) {
    std::ostringstream msg;
    msg << "expected " << k << " distinct controllers, got " << strategy.controllers.size() << " entries ("
        << active.size() << " distinct)";
    out.push_back({19, msg.str()});
  }
  if (static_cast<int>(strategy.assignment.size()) != n) {
    out.push_back({20, "assignment covers " + std::to_string(strategy.assignment.size()) + " of " +
                           std::to_string(n) + " switches"});
  }
  for (std::size_t sw = 0; sw < strategy.assignment.size(); ++sw) {
    const int c = strategy.assignment[sw];
    if (c < 0 || c >= n) {
      out.push_back({17, "switch " + std::to_string(sw) + " assigned to index " + std::to_string(c)});
    } else if (!active.contains(c)) {
      out.push_back({18, "switch " + std::to_string(sw) + " assigned to inactive satellite " + std::to_string(c)});
    }
  }
  return out;
}

namespace {

int assigned_count(const Strategy& s, int controller) {
  return static_cast<int>(std::count(s.assignment.begin(), s.assignment.end(), controller));
}

double backlog_wait_ms(const ControllerBacklogs& backlogs, const DelayParams& d, int controller) {
  return static_cast<double>(backlogs.at(controller)) / d.lambda_for(controller) * 1000.0;
}

double queuing(const SlotContext& ctx, int sw, int controller, int count, double wait_ms) {
  const double first = ctx.delay.rho_ms * static_cast<double>(count) * static_cast<double>(count);
  return first + std::max(0.0, wait_ms - ctx.transit_ms[ctx.idx(sw, controller)]);
}

double response(const SlotContext& ctx, int sw, int controller, int count, double wait_ms) {
  return 2.0 * ctx.path_core_ms[ctx.idx(sw, controller)] + ctx.delay.transmission_ms +
         queuing(ctx, sw, controller, count, wait_ms);
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double queuing_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs,
                        int sw, int controller) {
  return queuing(ctx, sw, controller, assigned_count(strategy, controller),
                 backlog_wait_ms(backlogs, ctx.delay, controller));
}

double response_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs,
                         int sw, int controller) {
  return response(ctx, sw, controller, assigned_count(strategy, controller),
                  backlog_wait_ms(backlogs, ctx.delay, controller));
}

double avg_response_delay_ms(const SlotContext& ctx, const Strategy& strategy, const ControllerBacklogs& backlogs) {
  double weighted = 0.0;
  std::int64_t total = 0;
  for (int sw = 0; sw < ctx.size(); ++sw) {
    const auto p = ctx.requests[static_cast<std::size_t>(sw)];
    if (p == 0) continue;
    weighted += response_delay_ms(ctx, strategy, backlogs, sw, strategy.assignment[static_cast<std::size_t>(sw)]) *
                static_cast<double>(p);
    total += p;
  }
  return total == 0 ? 0.0 : weighted / static_cast<double>(total);
}

double migration_cost_ms(const SlotContext& ctx, const Strategy& current, const Strategy* previous) {
  if (previous == nullptr || previous->controllers.empty()) return 0.0;
  const std::set<int> old(previous->controllers.begin(), previous->controllers.end());
  double cost = 0.0;
  for (int c : sorted(current.controllers)) {
    if (old.contains(c)) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (int o : old) nearest = std::min(nearest, ctx.propagation_ms[ctx.idx(c, o)]);
    cost += nearest + ctx.delay.transfer_ms();
  }
  return cost;
}

double reassignment_cost_ms(const SlotContext& ctx, const Strategy& current, const Strategy* previous) {
  if (previous == nullptr || previous->assignment.size() != current.assignment.size()) return 0.0;
  double cost = 0.0;
  for (std::size_t sw = 0; sw < current.assignment.size(); ++sw) {
    const int c = current.assignment[sw];
    if (c != previous->assignment[sw]) cost += 6.0 * ctx.propagation_ms[ctx.idx(static_cast<int>(sw), c)];
  }
  return cost;
}

double synchronization_cost_ms(const SlotContext& ctx, const Strategy& strategy) {
  const auto cs = sorted(strategy.controllers);
  double cost = 0.0;
  for (int a : cs) {
    for (int b : cs) {
      if (a != b) cost += ctx.propagation_ms[ctx.idx(a, b)];
    }
  }
  return cost;
}

namespace {

double load_std(std::span<const std::int64_t> loads) {
  if (loads.empty()) return 0.0;
  const double k = static_cast<double>(loads.size());
  const double mean = static_cast<double>(std::accumulate(loads.begin(), loads.end(), std::int64_t{0})) / k;
  double ss = 0.0;
  for (auto l : loads) {
    const double dev = static_cast<double>(l) - mean;
    ss += dev * dev;
  }
  return std::sqrt(ss / k);
}

}  // namespace

double load_balance_factor(const Strategy& strategy, std::span<const std::int64_t> requests) {
  const auto cs = sorted(strategy.controllers);
  std::vector<std::int64_t> loads(cs.size(), 0);
  for (std::size_t sw = 0; sw < strategy.assignment.size(); ++sw) {
    const auto it = std::lower_bound(cs.begin(), cs.end(), strategy.assignment[sw]);
    if (it != cs.end() && *it == strategy.assignment[sw]) loads[static_cast<std::size_t>(it - cs.begin())] += requests[sw];
  }
  return load_std(loads);
}

BacklogUpdate update_backlogs(const Strategy& prev_strategy, std::span<const std::int64_t> prev_requests,
                              const ControllerBacklogs& prev_backlogs, const DelayParams& params,
                              double slot_seconds) {
  BacklogUpdate out;
  std::map<int, std::int64_t> arrivals;
  for (int c : prev_strategy.controllers) arrivals[c] = 0;
  for (std::size_t sw = 0; sw < prev_strategy.assignment.size(); ++sw) {
    arrivals[prev_strategy.assignment[sw]] += prev_requests[sw];
  }
  for (const auto& [c, arr] : arrivals) {
    const std::int64_t queued = arr + prev_backlogs.at(c);
    const std::int64_t cap = params.capacity(c, slot_seconds);
    out.next.backlog[c] = std::max<std::int64_t>(0, queued - cap);
    out.processed += std::min(queued, cap);
    out.arrivals += arr;
  }
  for (const auto& [c, b] : prev_backlogs.backlog) {
    if (!arrivals.contains(c)) out.orphaned += b;
  }
  return out;
}

int backlog_spill_count(const Strategy& strategy, const ControllerBacklogs& backlogs, const DelayParams& params,
                        double slot_seconds) {
  int spills = 0;
  for (int c : strategy.controllers) {
    if (backlog_wait_ms(backlogs, params, c) > slot_seconds * 1000.0) ++spills;
  }
  return spills;
}

Evaluator::Evaluator(const SlotContext& ctx, const Strategy* previous, const ControllerBacklogs& backlogs,
                     const Weights& weights)
    : ctx_(&ctx),
      weights_(weights),
      has_previous_(previous != nullptr && !previous->controllers.empty()),
      prev_controller_(static_cast<std::size_t>(ctx.size()), 0),
      backlog_wait_ms_(static_cast<std::size_t>(ctx.size()), 0.0),
      total_requests_(std::accumulate(ctx.requests.begin(), ctx.requests.end(), std::int64_t{0})) {
  if (has_previous_) {
    prev_controllers_ = sorted(previous->controllers);
    prev_assignment_ = previous->assignment;
    for (int c : prev_controllers_) prev_controller_[static_cast<std::size_t>(c)] = 1;
  }
  for (int sat = 0; sat < ctx.size(); ++sat) {
    backlog_wait_ms_[static_cast<std::size_t>(sat)] = backlog_wait_ms(backlogs, ctx.delay, sat);
  }
}

CostBreakdown Evaluator::evaluate(const Strategy& strategy) const {
  const SlotContext& ctx = *ctx_;
  const auto n = static_cast<std::size_t>(ctx.size());
  const auto cs = sorted(strategy.controllers);

  std::vector<int> count(n, 0);
  std::vector<std::int64_t> load(n, 0);
  for (std::size_t sw = 0; sw < n; ++sw) {
    const auto c = static_cast<std::size_t>(strategy.assignment[sw]);
    ++count[c];
    load[c] += ctx.requests[sw];
  }

  CostBreakdown out;

  std::vector<std::int64_t> loads;
  loads.reserve(cs.size());
  for (int c : cs) loads.push_back(load[static_cast<std::size_t>(c)]);
  out.load_balance = load_std(loads);

  if (total_requests_ > 0) {
    double weighted = 0.0;
    for (std::size_t sw = 0; sw < n; ++sw) {
      const auto p = ctx.requests[sw];
      if (p == 0) continue;
      const int c = strategy.assignment[sw];
      weighted += response(ctx, static_cast<int>(sw), c, count[static_cast<std::size_t>(c)],
                           backlog_wait_ms_[static_cast<std::size_t>(c)]) *
                  static_cast<double>(p);
    }
    out.avg_response_ms = weighted / static_cast<double>(total_requests_);
  }

  if (has_previous_) {
    for (int c : cs) {
      if (prev_controller_[static_cast<std::size_t>(c)]) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (int o : prev_controllers_) nearest = std::min(nearest, ctx.propagation_ms[ctx.idx(c, o)]);
      out.migration_ms += nearest + ctx.delay.transfer_ms();
    }
    if (prev_assignment_.size() == n) {
      for (std::size_t sw = 0; sw < n; ++sw) {
        const int c = strategy.assignment[sw];
        if (c != prev_assignment_[sw]) out.reassignment_ms += 6.0 * ctx.propagation_ms[ctx.idx(static_cast<int>(sw), c)];
      }
    }
  }

  for (int a : cs) {
    for (int b : cs) {
      if (a != b) out.sync_ms += ctx.propagation_ms[ctx.idx(a, b)];
    }
  }

  out.objective = weights_.load_balance * out.load_balance + weights_.response * out.avg_response_ms +
                  weights_.migration * out.migration_ms + weights_.reassignment * out.reassignment_ms +
                  weights_.sync * out.sync_ms;
  return out;
}

CostBreakdown objective(const SlotContext& ctx, const Strategy& current, const Strategy* previous,
                        const ControllerBacklogs& backlogs, const Weights& weights, int k) {
  const auto violations = validate(current, ctx.size(), k);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid strategy:";
    for (const auto& v : violations) msg << " (" << v.constraint << ") " << v.detail << ';';
    throw ValidationError(msg.str());
  }
  return Evaluator(ctx, previous, backlogs, weights).evaluate(current);
}

}  // namespace cpsa::cost
