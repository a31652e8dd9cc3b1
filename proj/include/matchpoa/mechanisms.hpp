#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchpoa/core.hpp"

namespace matchpoa {

// Times at which items run out during the simultaneous-eating simulation,
// indexed by item. All lie in (0, 1] and at least one equals 1.
struct ExhaustionTimes {
  std::vector<Rat> t;
};

struct PsResult {
  AssignmentMatrix p;
  ExhaustionTimes times;
};

// Simultaneous eating at unit speed: every agent consumes probability mass
// of their best remaining item until all items are gone. Exact, event-driven.
PsResult probabilistic_serial(const PreferenceProfile& prefs);

// Agents pick their best remaining item in the given picking order.
Matching serial_dictatorship(const PreferenceProfile& prefs,
                             const std::vector<int>& agent_order);

struct RpOptions {
  int exact_cap = 8;  // largest n for which the n! average is attempted
};

// Average of serial dictatorship over all n! picking orders, exact.
AssignmentMatrix random_priority_exact(const PreferenceProfile& prefs,
                                       const RpOptions& opt = {});

// Monte Carlo estimate over `trials` uniformly drawn picking orders.
AssignmentMatrix random_priority_sampled(const PreferenceProfile& prefs,
                                         std::uint64_t seed,
                                         std::uint64_t trials);

// Each agent dictates with probability 1/n and takes her reported top item;
// the remaining agents, in increasing index order, receive the remaining
// items in the order they appear in the dictator's ranking.
AssignmentMatrix random_dictatorial(const PreferenceProfile& prefs);

// Deterministic benchmark: maximizes reported welfare over matchings, breaking
// ties toward the lexicographically smallest item vector.
Matching naive_max_welfare(const ValuationProfile& reports);

enum class MechanismKind {
  ProbabilisticSerial,
  RandomPriority,
  SerialDictatorship,
  RandomDictatorial,
  NaiveMaxWelfare,
};

// Mechanism handle used by the equilibrium and property machinery. Ordinal
// mechanisms consume preference orders; NaiveMaxWelfare consumes full
// cardinal reports and is driven through its own cardinal entry points.
struct Mechanism {
  MechanismKind kind = MechanismKind::ProbabilisticSerial;
  RpOptions rp_opt;
  std::vector<int> dictator_order;  // SerialDictatorship only

  static Mechanism ps() { return {MechanismKind::ProbabilisticSerial, {}, {}}; }
  static Mechanism rp(int exact_cap = 8) {
    return {MechanismKind::RandomPriority, {exact_cap}, {}};
  }
  static Mechanism sd(std::vector<int> order) {
    return {MechanismKind::SerialDictatorship, {}, std::move(order)};
  }
  static Mechanism rd() { return {MechanismKind::RandomDictatorial, {}, {}}; }
  static Mechanism naive() { return {MechanismKind::NaiveMaxWelfare, {}, {}}; }

  bool ordinal() const { return kind != MechanismKind::NaiveMaxWelfare; }
  std::string name() const;
};

Mechanism mechanism_from_string(const std::string& name);

// Runs an ordinal mechanism on reported orders. Throws DomainError for
// NaiveMaxWelfare, which has no ordinal form.
AssignmentMatrix run_ordinal(const Mechanism& mech, const PreferenceProfile& prefs);

namespace detail {

// Eating simulation over one running int64 common denominator: probabilities
// are pnum[i*n+j] / D and exhaustion times tnum[j] / D. ok is false when the
// denominator would overflow (callers rerun with arbitrary precision).
struct PsRaw {
  bool ok = false;
  std::int64_t D = 1;
  std::vector<std::int64_t> pnum;
  std::vector<std::int64_t> tnum;
};

PsRaw ps_raw_int64(const PreferenceProfile& prefs);

}  // namespace detail

}  // namespace matchpoa
