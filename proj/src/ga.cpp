#include "cpsa/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cpsa/error.hpp"

namespace cpsa::ga {

namespace {

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(double p, Rng& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace

void check_chromosome(const Chromosome& c, int n) {
  const int k = static_cast<int>(c.placement.size());
  if (k == 0) throw CodecError("chromosome has an empty placement segment");
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (int g : c.placement) {
    if (g < 0 || g >= n) throw CodecError("placement gene " + std::to_string(g) + " outside 0.." + std::to_string(n - 1));
    if (seen[static_cast<std::size_t>(g)]) throw CodecError("placement gene " + std::to_string(g) + " repeats");
    seen[static_cast<std::size_t>(g)] = 1;
  }
  if (static_cast<int>(c.assignment.size()) != n) {
    throw CodecError("assignment segment has " + std::to_string(c.assignment.size()) + " genes, expected " +
                     std::to_string(n));
  }
  for (int g : c.assignment) {
    if (g < 0 || g >= k) throw CodecError("assignment gene " + std::to_string(g) + " outside 0.." + std::to_string(k - 1));
  }
}

Chromosome encode(const cost::Strategy& strategy) {
  Chromosome c;
  c.placement = strategy.controllers;
  c.assignment.reserve(strategy.assignment.size());
  for (int sat : strategy.assignment) {
    const auto it = std::find(strategy.controllers.begin(), strategy.controllers.end(), sat);
    if (it == strategy.controllers.end()) {
      throw CodecError("cannot encode: satellite " + std::to_string(sat) + " is not a controller");
    }
    c.assignment.push_back(static_cast<int>(it - strategy.controllers.begin()));
  }
  return c;
}

cost::Strategy decode_unchecked(const Chromosome& c) {
  cost::Strategy s;
  s.controllers = c.placement;
  s.assignment.reserve(c.assignment.size());
  for (int g : c.assignment) s.assignment.push_back(c.placement[static_cast<std::size_t>(g)]);
  return s;
}

cost::Strategy decode(const Chromosome& c, int n) {
  check_chromosome(c, n);
  return decode_unchecked(c);
}

Chromosome random_chromosome(int n, int k, Rng& rng) {
  std::vector<int> sats(static_cast<std::size_t>(n));
  std::iota(sats.begin(), sats.end(), 0);
  Chromosome c;
  for (int i = 0; i < k; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + uniform_index(static_cast<std::size_t>(n - i), rng);
    std::swap(sats[static_cast<std::size_t>(i)], sats[j]);
    c.placement.push_back(sats[static_cast<std::size_t>(i)]);
  }
  std::uniform_int_distribution<int> gene(0, k - 1);
  c.assignment.resize(static_cast<std::size_t>(n));
  for (auto& g : c.assignment) g = gene(rng);
  return c;
}

Chromosome cluster_seed(int k, const constellation::DistanceMatrix& dm, int max_iters, Rng& rng) {
  const int n = dm.n;
  if (k < 1 || k > n) throw ConfigError("cluster_seed: K must lie in 1..N");
  std::vector<int> centres = random_chromosome(n, k, rng).placement;
  std::vector<int> member_of(static_cast<std::size_t>(n), 0);

  auto assign = [&] {
    for (int v = 0; v < n; ++v) {
      int best = 0;
      for (int c = 1; c < k; ++c) {
        const double dc = dm.at(v, centres[static_cast<std::size_t>(c)]);
        const double db = dm.at(v, centres[static_cast<std::size_t>(best)]);
        if (dc < db || (dc == db && centres[static_cast<std::size_t>(c)] < centres[static_cast<std::size_t>(best)])) best = c;
      }
      member_of[static_cast<std::size_t>(v)] = best;
    }
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    assign();
    std::vector<int> updated = centres;
    for (int c = 0; c < k; ++c) {
      double best_sum = std::numeric_limits<double>::infinity();
      for (int m = 0; m < n; ++m) {
        if (member_of[static_cast<std::size_t>(m)] != c) continue;
        double sum = 0.0;
        for (int v = 0; v < n; ++v) {
          if (member_of[static_cast<std::size_t>(v)] == c) sum += dm.at(m, v);
        }
        if (sum < best_sum) {
          best_sum = sum;
          updated[static_cast<std::size_t>(c)] = m;
        }
      }
    }
    if (updated == centres) break;
    centres = std::move(updated);
  }
  assign();
  return {centres, member_of};
}

std::vector<std::size_t> tournament_select(std::span<const double> objectives, std::size_t count,
                                           int tournament_size, Rng& rng) {
  std::vector<std::size_t> parents;
  parents.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = uniform_index(objectives.size(), rng);
    for (int t = 1; t < tournament_size; ++t) {
      const std::size_t cand = uniform_index(objectives.size(), rng);
      if (objectives[cand] < objectives[best]) best = cand;
    }
    parents.push_back(best);
  }
  return parents;
}

namespace {

// Child = window from `donor`, everything else from `base`, repaired so that
// out-of-window genes that collide with the window follow the window's
// donor -> base value mapping until they no longer collide.
std::vector<int> pmx_child(std::span<const int> base, std::span<const int> donor, std::size_t lo, std::size_t hi,
                           int satellites, Rng& rng, int& fallbacks) {
  const std::size_t k = base.size();
  std::vector<int> child(base.begin(), base.end());
  for (std::size_t i = lo; i <= hi; ++i) child[i] = donor[i];

  auto in_window = [&](int v) -> std::ptrdiff_t {
    for (std::size_t j = lo; j <= hi; ++j) {
      if (donor[j] == v) return static_cast<std::ptrdiff_t>(j);
    }
    return -1;
  };
  for (std::size_t i = 0; i < k; ++i) {
    if (i >= lo && i <= hi) continue;
    int v = child[i];
    std::size_t steps = 0;
    for (std::ptrdiff_t j = in_window(v); j >= 0 && steps <= k; j = in_window(v), ++steps) {
      v = base[static_cast<std::size_t>(j)];
    }
    if (in_window(v) >= 0) {
      // Chain did not settle; substitute an unused satellite.
      std::vector<int> unused;
      for (int s = 0; s < satellites; ++s) {
        if (std::find(child.begin(), child.end(), s) == child.end()) unused.push_back(s);
      }
      v = unused[uniform_index(unused.size(), rng)];
      ++fallbacks;
    }
    child[i] = v;
  }
  return child;
}

}  // namespace

PmxResult pmx_crossover_window(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi,
                               int satellites, Rng& rng) {
  PmxResult r;
  r.child_a = pmx_child(a, b, lo, hi, satellites, rng, r.fallbacks);
  r.child_b = pmx_child(b, a, lo, hi, satellites, rng, r.fallbacks);
  return r;
}

PmxResult pmx_crossover(std::span<const int> a, std::span<const int> b, int satellites, Rng& rng) {
  std::size_t lo = uniform_index(a.size(), rng);
  std::size_t hi = uniform_index(a.size(), rng);
  if (lo > hi) std::swap(lo, hi);
  return pmx_crossover_window(a, b, lo, hi, satellites, rng);
}

std::pair<std::vector<int>, std::vector<int>> two_point_crossover_at(std::span<const int> a, std::span<const int> b,
                                                                     std::size_t first, std::size_t last) {
  std::vector<int> ca(a.begin(), a.end());
  std::vector<int> cb(b.begin(), b.end());
  for (std::size_t i = first; i < last; ++i) std::swap(ca[i], cb[i]);
  return {std::move(ca), std::move(cb)};
}

std::pair<std::vector<int>, std::vector<int>> two_point_crossover(std::span<const int> a, std::span<const int> b,
                                                                  Rng& rng) {
  std::size_t first = uniform_index(a.size() + 1, rng);
  std::size_t last = uniform_index(a.size() + 1, rng);
  if (first > last) std::swap(first, last);
  return two_point_crossover_at(a, b, first, last);
}

void reverse_mutation(std::vector<int>& segment, Rng& rng) {
  std::size_t i = uniform_index(segment.size(), rng);
  std::size_t j = uniform_index(segment.size(), rng);
  if (i > j) std::swap(i, j);
  std::reverse(segment.begin() + static_cast<std::ptrdiff_t>(i), segment.begin() + static_cast<std::ptrdiff_t>(j) + 1);
}

void breeder_mutation(std::vector<int>& segment, int k, const BreederParams& params, Rng& rng) {
  const double range = params.shrink * (k - 1);
  if (range <= 0.0 || !(params.rate > 0.0)) return;
  // Successes of a Bernoulli sequence are drawn as geometric gaps, which keeps
  // the cost proportional to the genes and bits that actually fire.
  std::geometric_distribution<std::size_t> gene_gap(std::min(params.rate, 1.0));
  std::geometric_distribution<int> bit_gap(1.0 / params.gradient);
  for (std::size_t at = gene_gap(rng); at < segment.size(); at += 1 + gene_gap(rng)) {
    double delta = 0.0;
    for (int i = bit_gap(rng); i < params.gradient; i += 1 + bit_gap(rng)) delta += std::ldexp(1.0, -i);
    // Round the step, not the sum, so a half step moves the gene either way.
    const double step = std::floor(range * delta + 0.5);
    int& g = segment[at];
    const double moved = chance(0.5, rng) ? g + step : g - step;
    g = static_cast<int>(std::clamp(moved, 0.0, static_cast<double>(k - 1)));
  }
}

double breeder_max_step(int k, double shrink, int gradient) {
  return shrink * (k - 1) * (2.0 - std::ldexp(1.0, 1 - gradient));
}

void GAParams::validate() const {
  auto prob = [](double p, const char* field) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("ga.") + field + ": must lie in [0, 1]");
  };
  if (population_size < 2) throw ConfigError("ga.population_size: must be at least 2");
  if (max_generations < 1) throw ConfigError("ga.max_generations: must be positive");
  if (stall_limit < 1 || stall_limit > max_generations) {
    throw ConfigError("ga.stall_limit: must lie in 1..max_generations");
  }
  if (!(stall_epsilon >= 0.0)) throw ConfigError("ga.stall_epsilon: must be >= 0");
  prob(crossover_prob_placement, "crossover_prob_placement");
  prob(crossover_prob_assignment, "crossover_prob_assignment");
  prob(mutation_prob_placement, "mutation_prob_placement");
  prob(replacement_mutation_rate, "replacement_mutation_rate");
  if (mutation_rate_assignment > 1.0) throw ConfigError("ga.mutation_rate_assignment: must be <= 1");
  if (!(breeder_shrink >= 0.0)) throw ConfigError("ga.breeder_shrink: must be >= 0");
  if (breeder_gradient < 1) throw ConfigError("ga.breeder_gradient: must be positive");
  if (tournament_size < 1) throw ConfigError("ga.tournament_size: must be positive");
  if (prior_pool_size < 0 || (use_prior && (prior_pool_size < 1 || prior_pool_size >= population_size))) {
    throw ConfigError("ga.prior_pool_size: must lie in 1..population_size-1");
  }
  if (cluster_max_iters < 1) throw ConfigError("ga.cluster_max_iters: must be positive");
}

std::uint64_t slot_seed(std::uint64_t base, int slot) {
  // splitmix64 finaliser
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(slot) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SlotSolution evolve_slot(const cost::SlotContext& ctx, const cost::Strategy* predecessor,
                         std::span<const Chromosome> prior, const cost::ControllerBacklogs& backlogs,
                         const cost::Weights& weights, int k, const GAParams& params, std::uint64_t seed,
                         const GenerationObserver& observer) {
  params.validate();
  const int n = ctx.size();
  if (k < 1 || k > n) throw ConfigError("ga: K must lie in 1..N (K=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");

  Rng rng(seed);
  const cost::Evaluator evaluator(ctx, predecessor, backlogs, weights);
  const auto pop_size = static_cast<std::size_t>(params.population_size);
  const BreederParams breeder{params.mutation_rate_assignment > 0.0 ? params.mutation_rate_assignment : 1.0 / n,
                              params.breeder_shrink, params.breeder_gradient};

  std::vector<Chromosome> population;
  population.reserve(pop_size);
  for (const auto& c : prior) {
    if (population.size() == pop_size) break;
    if (static_cast<int>(c.placement.size()) != k) continue;
    check_chromosome(c, n);
    population.push_back(c);
  }
  while (population.size() < pop_size) population.push_back(random_chromosome(n, k, rng));

  std::vector<double> objective(pop_size);
  auto evaluate_all = [&](std::size_t from) {
    for (std::size_t i = from; i < pop_size; ++i) objective[i] = evaluator.objective(decode_unchecked(population[i]));
  };
  evaluate_all(0);

  auto argmin = [&] {
    return static_cast<std::size_t>(std::min_element(objective.begin(), objective.end()) - objective.begin());
  };

  SlotSolution sol;
  std::size_t best = argmin();
  double best_global = objective[best];
  sol.best_chromosome = population[best];
  sol.convergence_trace.push_back(best_global);
  if (observer) observer(0, population);

  int stall = 0;
  int generation = 0;
  while (generation < params.max_generations) {
    const std::size_t elite = argmin();
    const auto parents = tournament_select(objective, pop_size - 1, params.tournament_size, rng);

    std::vector<Chromosome> next;
    next.reserve(pop_size);
    next.push_back(population[elite]);
    const double elite_objective = objective[elite];
    for (std::size_t p : parents) next.push_back(population[p]);

    for (std::size_t i = 1; i + 1 < next.size(); i += 2) {
      Chromosome& a = next[i];
      Chromosome& b = next[i + 1];
      if (chance(params.crossover_prob_placement, rng)) {
        auto r = pmx_crossover(a.placement, b.placement, n, rng);
        a.placement = std::move(r.child_a);
        b.placement = std::move(r.child_b);
        sol.pmx_fallbacks += r.fallbacks;
      }
      if (chance(params.crossover_prob_assignment, rng)) {
        auto [ca, cb] = two_point_crossover(a.assignment, b.assignment, rng);
        a.assignment = std::move(ca);
        b.assignment = std::move(cb);
      }
    }
    for (std::size_t i = 1; i < next.size(); ++i) {
      Chromosome& c = next[i];
      if (chance(params.mutation_prob_placement, rng)) reverse_mutation(c.placement, rng);
      if (k < n && chance(params.replacement_mutation_rate, rng)) {
        std::vector<int> unused;
        for (int s = 0; s < n; ++s) {
          if (std::find(c.placement.begin(), c.placement.end(), s) == c.placement.end()) unused.push_back(s);
        }
        c.placement[uniform_index(c.placement.size(), rng)] = unused[uniform_index(unused.size(), rng)];
      }
      breeder_mutation(c.assignment, k, breeder, rng);
    }

    population = std::move(next);
    objective[0] = elite_objective;
    evaluate_all(1);
    ++generation;

    best = argmin();
    const double gen_best = objective[best];
    if (best_global - gen_best >= params.stall_epsilon) {
      stall = 0;
      sol.convergence_generation = generation;
    } else {
      ++stall;
    }
    if (gen_best < best_global) {
      best_global = gen_best;
      sol.best_chromosome = population[best];
    }
    sol.convergence_trace.push_back(gen_best);
    if (observer) observer(generation, population);
    if (stall >= params.stall_limit) break;
  }
  sol.generations_run = generation;

  sol.best_strategy = decode_unchecked(sol.best_chromosome);
  sol.best_cost = evaluator.evaluate(sol.best_strategy);

  // Uniform sample without replacement from the final generation.
  std::vector<std::size_t> order(pop_size);
  std::iota(order.begin(), order.end(), 0);
  const auto pool = std::min(static_cast<std::size_t>(params.prior_pool_size), pop_size);
  for (std::size_t i = 0; i < pool; ++i) {
    std::swap(order[i], order[i + uniform_index(pop_size - i, rng)]);
    sol.elite_pool.push_back(population[order[i]]);
  }
  return sol;
}

}  // namespace cpsa::ga
