#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchpoa/core.hpp"
#include "matchpoa/equilibrium.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/rational.hpp"

namespace matchpoa {

// Adversarial instance families; each one drives a lower-bound pipeline.
enum class Family { Thm4General, Thm5Deterministic, Thm6Pos, Thm10UnitRange };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ConstructionParams {
  Family family = Family::Thm6Pos;
  int n = 0;      // thm5/thm6 take n directly; thm4/thm10 use n = k^2
  int k = 0;      // thm4/thm10 group count; thm6 popular-item count (0: floor sqrt n)
  Rat alpha;      // thm4 bump; 0 means the default 1/n^4
  Rat delta;      // thm10 scale; 0 means the smallest a/10 with n > 1/delta^4

  ConstructionParams resolved() const;  // fills n/k/alpha/delta per family
};

// k^2 agents in k groups; group j values item j at 1/n + alpha and every
// other item at 1/n - alpha/(n-1).
ValuationProfile gen_thm4(int k, const Rat& alpha = Rat(0));

// Swap profile: each group's member with the smallest probability of the
// group item (ties to the lower index) becomes an indicator row for it.
ValuationProfile derive_thm4_prime(const ValuationProfile& u, const AssignmentMatrix& p);

// Identical strictly-decreasing rows, top value 1/n + 1/n^3; the swap profile
// moves agent i's mass onto item i-1, agent 1 unchanged.
std::pair<ValuationProfile, ValuationProfile> gen_thm5(int n);

// Agents 1..k are indicators for their own items; the rest split value 1/k
// over items 1..k.
ValuationProfile gen_thm6_pos(int n, int k = 0);

// Unit-range family on k^2 agents: everyone values item 1 at 1; the first k
// agents value items 2..k+1 at delta^2, the rest at delta^3.
ValuationProfile gen_thm10_unit_range(int k, const Rat& delta = Rat(0));

struct StrategyMode {
  enum class Kind { TruthfulCandidate, BrdSearch, Explicit };
  Kind kind = Kind::TruthfulCandidate;
  PreferenceProfile profile;  // explicit mode
  std::uint64_t brd_seed = 0;

  static StrategyMode truthful() { return {}; }
  static StrategyMode brd(std::uint64_t seed = 0) {
    return {Kind::BrdSearch, {}, seed};
  }
  static StrategyMode explicit_profile(PreferenceProfile p) {
    return {Kind::Explicit, std::move(p), 0};
  }
};

struct ConstructionReport {
  Family family = Family::Thm6Pos;
  std::string mechanism;
  int n = 0;
  int k = 0;
  ValuationProfile u;
  std::optional<ValuationProfile> u_prime;
  std::optional<EquilibriumReport> eq_u;                  // ordinal mechanisms
  std::optional<EquilibriumReport> eq_u_prime;
  std::optional<CardinalEquilibriumReport> ceq_u;         // cardinal pipeline
  std::optional<CardinalEquilibriumReport> ceq_u_prime;
  std::vector<EquilibriumReport> equilibria;              // thm6 enumeration
  bool conclusive = false;  // equilibrium evidence obtained and verified
  Rat welfare;              // at the audited equilibrium, under the final truth
  Rat opt;                  // max-welfare benchmark under the final truth
  Rat ratio;                // opt / welfare
  std::optional<Rat> poa;   // thm6: over all enumerated equilibria
  std::optional<Rat> pos;
  Rat predicted_bound;      // proof's lower bound on the ratio
  bool has_prediction = false;
  std::vector<std::string> notes;
};

ConstructionReport verify_construction(const Mechanism& mech, const ConstructionParams& params,
                                       const StrategyMode& mode = StrategyMode::truthful());

}  // namespace matchpoa
