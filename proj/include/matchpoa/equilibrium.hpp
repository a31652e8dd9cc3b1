#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matchpoa/core.hpp"
#include "matchpoa/mechanisms.hpp"

namespace matchpoa {

// Set of own-strategies an agent may deviate to. AllStrictOrders is the full
// ordinal strategy space; TopM keeps the tail of the current strategy fixed
// and permutes the first m positions; ExplicitList searches given orders.
struct DeviationSpace {
  enum class Kind { AllStrictOrders, TopM, ExplicitList };
  Kind kind = Kind::AllStrictOrders;
  int m = 0;
  std::vector<PreferenceOrder> list;

  static DeviationSpace all() { return {}; }
  static DeviationSpace top(int m) { return {Kind::TopM, m, {}}; }
  static DeviationSpace explicit_list(std::vector<PreferenceOrder> orders) {
    return {Kind::ExplicitList, 0, std::move(orders)};
  }

  std::uint64_t size(int n) const;
  std::string describe(int n) const;

  // Candidate strategies in lexicographic ranking order (list kind: sorted,
  // duplicates removed), so argmax ties resolve deterministically.
  std::vector<PreferenceOrder> candidates(int n, const PreferenceOrder& current) const;
};

struct EqOptions {
  std::uint64_t eval_budget = 1'000'000;  // deviations evaluated per agent
};

// Exact expected utility of `agent` under the mechanism outcome at
// `strategies`, measured against her true valuation row.
Rat expected_utility(const Mechanism& mech, const std::vector<Rat>& truth_row,
                     const PreferenceProfile& strategies, int agent);

struct BestResponse {
  PreferenceOrder strategy;
  Rat utility;
  std::uint64_t evaluations = 0;
};

// Exhaustive argmax of expected utility over the deviation space, holding the
// other agents fixed at `strategies`. Ties break toward the lexicographically
// smallest ranking.
BestResponse best_response(const Mechanism& mech, const std::vector<Rat>& truth_row,
                           const PreferenceProfile& strategies, int agent,
                           const DeviationSpace& space, const EqOptions& opt = {});

struct Deviation {
  int agent = -1;
  PreferenceOrder strategy;
  Rat gain;
};

struct EquilibriumReport {
  PreferenceProfile profile;
  bool verified = false;
  std::string deviation_space;
  Rat epsilon;
  Rat max_gain;                      // best single-agent improvement found
  Rat welfare;                       // true welfare of the outcome at profile
  std::optional<Deviation> witness;  // set when not verified
};

// Checks that no agent can gain more than epsilon by deviating within the
// space. epsilon = 0 is exact pure Nash.
EquilibriumReport verify_pure_nash(const Mechanism& mech, const ValuationProfile& truth,
                                   const PreferenceProfile& strategies,
                                   const DeviationSpace& space, const Rat& epsilon = Rat(0),
                                   const EqOptions& opt = {});

struct EnumerateOptions {
  std::uint64_t profile_budget = 331776;  // (4!)^4: full enumeration up to n=4
};

// Tests every profile of strict orders against all-strict-orders deviations
// and returns the verified ones in profile-enumeration order.
std::vector<EquilibriumReport> enumerate_pure_nash(const Mechanism& mech,
                                                   const ValuationProfile& truth,
                                                   const Rat& epsilon = Rat(0),
                                                   const EnumerateOptions& opt = {});

enum class AgentOrder { RoundRobin, SeededRandom };

struct BrdOptions {
  int max_passes = 100;
  AgentOrder order = AgentOrder::RoundRobin;
  std::uint64_t seed = 0;
  Rat epsilon;  // switch only on gain strictly above this
  EqOptions eq;
};

struct BrdResult {
  PreferenceProfile profile;
  bool converged = false;
  int passes = 0;
  std::uint64_t evaluations = 0;
  // Verification of the final profile over all strict orders; present unless
  // the dynamics were cut off before producing anything to verify.
  std::optional<EquilibriumReport> report;
};

// One-agent-at-a-time best response over all strict orders, starting from
// init. Converged means a full pass changed nothing; the final profile is
// re-verified rather than trusted.
BrdResult best_response_dynamics(const Mechanism& mech, const ValuationProfile& truth,
                                 PreferenceProfile init, const BrdOptions& opt = {});

// Cardinal deviation grid for naive max welfare: reported rows with entries
// in {0, 1/D, ..., D/D} summing to one.
struct GridSpace {
  int D = 8;

  std::uint64_t rows(int n) const;  // compositions of D into n parts
  std::vector<std::vector<Rat>> all_rows(int n) const;
  std::string describe(int n) const;
};

struct CardinalDeviation {
  int agent = -1;
  std::vector<Rat> report;
  Rat gain;
};

struct CardinalEquilibriumReport {
  std::vector<std::vector<Rat>> reports;
  bool verified = false;
  std::string deviation_space;
  Rat epsilon;
  Rat max_gain;
  Rat welfare;
  std::optional<CardinalDeviation> witness;
};

// Equilibrium check for the cardinal naive mechanism, certified only relative
// to the grid: each agent's deviations range over GridSpace rows.
CardinalEquilibriumReport verify_cardinal_nash(const ValuationProfile& truth,
                                               const std::vector<std::vector<Rat>>& reports,
                                               const GridSpace& space = {},
                                               const Rat& epsilon = Rat(0),
                                               const EqOptions& opt = {});

}  // namespace matchpoa
