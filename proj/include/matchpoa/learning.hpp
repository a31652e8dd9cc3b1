#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "matchpoa/core.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/rational.hpp"

namespace matchpoa {

enum class Learner { RegretMatching, MultiplicativeWeights };

std::string to_string(Learner l);
Learner learner_from_string(const std::string& s);

struct LearnOptions {
  std::uint64_t rounds = 1000;
  std::uint64_t seed = 0;
  Learner learner = Learner::RegretMatching;
  double eta = 0.5;        // multiplicative-weights step size
  int strategy_cap = 5;    // max n; the strategy set per agent is all n! orders
  int checkpoints = 10;    // evenly spaced regret snapshots
};

// Empirical outcome of independent no-regret learners playing the mechanism.
// The uniform distribution over the joint play history approaches a coarse
// correlated equilibrium as the average regrets go to zero. Payoffs are exact
// rationals; sampling weights are the learners' floating-point layer.
struct LearnedDistribution {
  int n = 0;
  Learner learner = Learner::RegretMatching;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  std::vector<PreferenceOrder> strategies;               // shared set, lex order
  std::vector<std::vector<std::uint64_t>> play_counts;   // [agent][strategy]
  std::map<std::uint64_t, std::uint64_t> joint_counts;   // profile key -> rounds
  std::vector<std::vector<double>> weights;              // final sampling weights
  std::vector<Rat> avg_regret_exact;                     // per agent
  std::vector<double> avg_regret;
  Rat avg_welfare_exact;
  double avg_welfare = 0.0;
  std::vector<std::pair<std::uint64_t, double>> checkpoints;  // (round, max avg regret)
};

// Profile keys encode one strategy index per agent, agent 1 most significant,
// base n! digits.
std::uint64_t encode_profile_key(const std::vector<std::uint32_t>& digits, std::uint64_t base);
std::vector<std::uint32_t> decode_profile_key(std::uint64_t key, int n, std::uint64_t base);

LearnedDistribution no_regret_dynamics(const Mechanism& mech, const ValuationProfile& truth,
                                       const LearnOptions& opt = {});

}  // namespace matchpoa
