#pragma once

// Prior-population genetic algorithm for per-slot controller placement and
// switch assignment.
//
// A chromosome has two segments: K placement genes holding distinct
// satellite indices, and N assignment genes each naming a position in the
// placement segment. Placement uses partially-matched crossover and reverse
// mutation; assignment uses two-point crossover and breeder-GA mutation.
// Consecutive slots are chained by seeding each slot's population with the
// previous best plus a random sample of the previous final generation.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cpsa/constellation.hpp"
#include "cpsa/cost.hpp"

namespace cpsa::ga {

using Rng = std::mt19937_64;

struct Chromosome {
  std::vector<int> placement;
  std::vector<int> assignment;

  bool operator==(const Chromosome&) const = default;
};

// Throws CodecError when placement genes repeat or leave 0..n-1, or when an
// assignment gene leaves 0..K-1.
void check_chromosome(const Chromosome& c, int n);

Chromosome encode(const cost::Strategy& strategy);
cost::Strategy decode(const Chromosome& c, int n);
// decode() without the codec checks, for chromosomes the operators produced.
cost::Strategy decode_unchecked(const Chromosome& c);

Chromosome random_chromosome(int n, int k, Rng& rng);

// k-medoids on shortest-path distances from K random centres. Stops at a
// fixed point or after max_iters rounds.
Chromosome cluster_seed(int k, const constellation::DistanceMatrix& dm, int max_iters, Rng& rng);

// Indices of `count` parents, each the lowest objective among
// tournament_size uniform draws with replacement.
std::vector<std::size_t> tournament_select(std::span<const double> objectives, std::size_t count,
                                           int tournament_size, Rng& rng);

struct PmxResult {
  std::vector<int> child_a;
  std::vector<int> child_b;
  int fallbacks = 0;  // genes replaced because the mapping chain did not resolve
};

// PMX with the window [lo, hi] (inclusive). `satellites` bounds the values
// drawn by the fallback repair.
PmxResult pmx_crossover_window(std::span<const int> a, std::span<const int> b, std::size_t lo, std::size_t hi,
                               int satellites, Rng& rng);
PmxResult pmx_crossover(std::span<const int> a, std::span<const int> b, int satellites, Rng& rng);

// Swaps genes in [first, last) between the parents.
std::pair<std::vector<int>, std::vector<int>> two_point_crossover_at(std::span<const int> a, std::span<const int> b,
                                                                     std::size_t first, std::size_t last);
std::pair<std::vector<int>, std::vector<int>> two_point_crossover(std::span<const int> a, std::span<const int> b,
                                                                  Rng& rng);

void reverse_mutation(std::vector<int>& segment, Rng& rng);

struct BreederParams {
  double rate = 0.0;     // per-gene mutation probability
  double shrink = 0.5;   // range = shrink * (K - 1)
  int gradient = 20;     // number of 2^-i terms
};

void breeder_mutation(std::vector<int>& segment, int k, const BreederParams& params, Rng& rng);

// Largest perturbation a single breeder step can apply before rounding:
// shrink * (K - 1) * (2 - 2^(1 - gradient)).
double breeder_max_step(int k, double shrink, int gradient);

struct GAParams {
  int population_size = 200;
  int max_generations = 500;
  int stall_limit = 300;
  double stall_epsilon = 1e-9;
  double crossover_prob_placement = 0.9;
  double crossover_prob_assignment = 0.7;
  double mutation_prob_placement = 0.3;
  // Per-gene breeder mutation probability; <= 0 means 1 / N. Most breeder
  // steps round to zero for small K, so 1 / N leaves the segment nearly frozen.
  double mutation_rate_assignment = 0.3;
  double breeder_shrink = 0.5;
  int breeder_gradient = 20;
  int tournament_size = 3;
  int prior_pool_size = 50;
  // Chance per child of swapping one placement gene for an unused satellite.
  // Reverse mutation only reorders controllers, and once the prior pool has
  // taken over, nothing else brings new satellites into the placement.
  double replacement_mutation_rate = 0.5;
  int cluster_max_iters = 100;
  bool use_prior = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SlotSolution {
  cost::Strategy best_strategy;
  Chromosome best_chromosome;
  cost::CostBreakdown best_cost;
  std::vector<Chromosome> elite_pool;
  int generations_run = 0;
  // Last generation whose best improved on the running best by at least the
  // stall epsilon; 0 when the initial population already held the optimum.
  int convergence_generation = 0;
  std::vector<double> convergence_trace;  // best objective, generation 0..generations_run
  int pmx_fallbacks = 0;
};

// Called after each generation is evaluated.
using GenerationObserver = std::function<void(int generation, std::span<const Chromosome> population)>;

// One slot of the prior-population GA. `prior` seeds the initial population
// (truncated to the population size); the rest is drawn at random.
SlotSolution evolve_slot(const cost::SlotContext& ctx, const cost::Strategy* predecessor,
                         std::span<const Chromosome> prior, const cost::ControllerBacklogs& backlogs,
                         const cost::Weights& weights, int k, const GAParams& params, std::uint64_t seed,
                         const GenerationObserver& observer = {});

// Per-slot seed derived from a run seed.
std::uint64_t slot_seed(std::uint64_t base, int slot);

}  // namespace cpsa::ga
