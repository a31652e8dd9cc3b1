#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchpoa/core.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/rational.hpp"
#include "matchpoa/rng.hpp"

namespace matchpoa {

struct PropertyViolation {
  std::uint64_t instance = 0;  // 1-based index into the tested sequence
  std::string witness;         // exact values that break the inequality
};

struct PropertyReport {
  std::string property;
  std::uint64_t instances = 0;
  std::string mode;  // "exhaustive", "random", "explicit"
  std::uint64_t seed = 0;
  bool exhaustive = false;
  std::vector<PropertyViolation> violations;

  bool passed() const { return violations.empty(); }
};

// True iff every prefix sum of p taken in `order` weakly exceeds that of q.
bool sd_dominates(const PreferenceOrder& order, const std::vector<Rat>& p,
                  const std::vector<Rat>& q);

struct ProfileSource {
  enum class Kind { Exhaustive, Random, Explicit };
  Kind kind = Kind::Exhaustive;
  int n = 3;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::vector<PreferenceProfile> profiles;

  static ProfileSource exhaustive(int n);
  static ProfileSource random(int n, std::uint64_t count, std::uint64_t seed);
  static ProfileSource explicit_profiles(std::vector<PreferenceProfile> profiles);
};

// Ordinal envy-freeness: at every tested profile s, each agent's allocation
// row sd-dominates every other row with respect to her own reported order.
PropertyReport check_envy_free(const Mechanism& mech, const ProfileSource& source);

struct OpponentSpace {
  enum class Kind { Exhaustive, Sampled };
  Kind kind = Kind::Exhaustive;
  int cap = 4;  // exhaustive mode allows n at most this
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static OpponentSpace exhaustive(int cap = 4);
  static OpponentSpace sampled(std::uint64_t count, std::uint64_t seed);
};

// Safe strategy: against every opponent profile in the space, the agent's
// allocation row sd-dominates the uniform lottery with respect to her true
// order. Exhaustive mode proves the property over ordinal opponents; sampled
// mode only gathers evidence.
PropertyReport check_safe_strategy(const Mechanism& mech, int agent,
                                   const PreferenceOrder& strategy,
                                   const PreferenceOrder& true_order,
                                   const OpponentSpace& space);

struct RandomInstances {
  std::uint64_t count = 20;
  std::uint64_t seed = 0;
  int n_min = 3;
  int n_max = 5;
  int grid = 1000;  // valuations drawn as integers 1..grid, normalized
};

std::vector<Rat> random_unit_sum_row(int n, int grid, Rng& rng);
ValuationProfile random_unit_sum_profile(int n, int grid, Rng& rng);
PreferenceProfile random_preference_profile(int n, Rng& rng);

// Four exact inequality checks behind the welfare guarantee, one report each:
//   quarter-time:       topping item j keeps its exhaustion time above a
//                       quarter of its old value
//   equilibrium-floor:  at every verified equilibrium, each agent's utility
//                       is at least a quarter of t_j times her value for j
//   time-floor:         ascending-sorted exhaustion times satisfy t_(j) >= j/n
//   truthful-dominance: a truthful agent's prefix sums are at least k/n
std::vector<PropertyReport> ps_bounds_suite(const RandomInstances& source);

}  // namespace matchpoa
