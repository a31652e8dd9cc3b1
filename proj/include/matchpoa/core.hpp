#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matchpoa/rational.hpp"

namespace matchpoa {

// How a valuation profile is normalized. UnitSum rows add to one; UnitRange
// rows have maximum one and minimum zero. Unchecked profiles skip both tests
// (useful for derived matrices that intentionally break normalization).
enum class Normalization { UnitSum, UnitRange, Unchecked };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

// Cardinal valuations: values[i][j] is agent i's value for item j.
// Agents and items are indexed 0..n-1 internally; serialized forms use 1..n.
struct ValuationProfile {
  int n = 0;
  std::vector<std::vector<Rat>> values;
  Normalization normalization = Normalization::UnitSum;
};

// Strict preference order over items, most preferred first.
struct PreferenceOrder {
  std::vector<int> ranking;

  bool operator==(const PreferenceOrder&) const = default;
  // Lexicographic on the ranking vector; used for deterministic tie-breaks.
  bool operator<(const PreferenceOrder& o) const { return ranking < o.ranking; }
};

// One strict order per agent.
using PreferenceProfile = std::vector<PreferenceOrder>;

// Deterministic outcome: item_of[i] is the item agent i receives.
struct Matching {
  std::vector<int> item_of;

  bool operator==(const Matching&) const = default;
};

struct SampleInfo {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
};

// Random outcome: p[i][j] is the probability agent i receives item j.
// Exact results leave `sampled` empty; Monte Carlo results record provenance.
struct AssignmentMatrix {
  std::vector<std::vector<Rat>> p;
  std::optional<SampleInfo> sampled;

  int n() const { return static_cast<int>(p.size()); }
};

AssignmentMatrix matrix_of(const Matching& mu, int n);

// Row sums one, column sums one, entries in [0, 1].
bool is_bistochastic(const AssignmentMatrix& m);

struct ValidationResult {
  bool ok = true;
  int agent = -1;        // first offending row, -1 when ok
  std::string message;   // empty when ok
};

// Checks shape, nonnegativity and the declared normalization.
ValidationResult validate_profile(const ValuationProfile& v);

enum class TieRule { Lexicographic };

// Strict order induced by a valuation row; ties go to the smaller item index.
PreferenceOrder induced_order(const std::vector<Rat>& values,
                              TieRule rule = TieRule::Lexicographic);
PreferenceProfile induced_profile(const ValuationProfile& v);

bool is_permutation_of_items(const std::vector<int>& ranking, int n);

// The n! strict orders over n items in lexicographic order of their rankings.
std::vector<PreferenceOrder> all_strict_orders(int n);

std::uint64_t factorial(int n);  // n <= 20

// Expected value of a valuation row under an assignment row.
Rat row_utility(const std::vector<Rat>& values, const std::vector<Rat>& probs);

}  // namespace matchpoa
