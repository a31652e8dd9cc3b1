#pragma once

#include <vector>

#include "matchpoa/core.hpp"

namespace matchpoa {

// Expected sum of true values under a random or deterministic assignment.
Rat social_welfare(const ValuationProfile& truth, const AssignmentMatrix& p);
Rat social_welfare(const ValuationProfile& truth, const Matching& mu);

// Exact value of a maximum-weight perfect matching (rows to columns).
Rat max_weight_value(const std::vector<std::vector<Rat>>& w);

struct OptResult {
  Matching mu;  // lexicographically smallest item vector among maximizers
  Rat welfare;
};

// Welfare-maximizing matching of agents to items under the given valuations.
OptResult optimal_matching(const ValuationProfile& v);

struct AnarchyRatios {
  Rat poa;  // opt / worst equilibrium welfare
  Rat pos;  // opt / best equilibrium welfare
};

// Both ratios over a nonempty set of equilibrium welfares. Throws DomainError
// when the set is empty or any welfare is nonpositive.
AnarchyRatios anarchy_ratios(const std::vector<Rat>& equilibrium_welfares,
                             const Rat& opt);

}  // namespace matchpoa
