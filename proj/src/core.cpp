#include "matchpoa/core.hpp"

#include <algorithm>
#include <numeric>

#include "matchpoa/errors.hpp"

namespace matchpoa {

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::UnitSum: return "unit-sum";
    case Normalization::UnitRange: return "unit-range";
    case Normalization::Unchecked: return "unchecked";
  }
  throw DomainError("unknown normalization");
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "unit-sum") return Normalization::UnitSum;
  if (s == "unit-range") return Normalization::UnitRange;
  if (s == "unchecked") return Normalization::Unchecked;
  throw ParseError("unknown normalization '" + s + "'");
}

AssignmentMatrix matrix_of(const Matching& mu, int n) {
  AssignmentMatrix m;
  m.p.assign(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) m.p[i][mu.item_of[i]] = Rat(1);
  return m;
}

bool is_bistochastic(const AssignmentMatrix& m) {
  int n = m.n();
  std::vector<Rat> col_sum(n, Rat(0));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m.p[i].size()) != n) return false;
    Rat row_sum(0);
    for (int j = 0; j < n; ++j) {
      const Rat& x = m.p[i][j];
      if (x.sign() < 0 || x > Rat(1)) return false;
      row_sum += x;
      col_sum[j] += x;
    }
    if (row_sum != Rat(1)) return false;
  }
  for (int j = 0; j < n; ++j) {
    if (col_sum[j] != Rat(1)) return false;
  }
  return true;
}

ValidationResult validate_profile(const ValuationProfile& v) {
  auto fail = [](int agent, std::string msg) {
    return ValidationResult{false, agent, std::move(msg)};
  };
  if (v.n <= 0) return fail(-1, "profile has no agents");
  if (static_cast<int>(v.values.size()) != v.n) {
    return fail(-1, "expected " + std::to_string(v.n) + " valuation rows, got " +
                        std::to_string(v.values.size()));
  }
  for (int i = 0; i < v.n; ++i) {
    const auto& row = v.values[i];
    if (static_cast<int>(row.size()) != v.n) {
      return fail(i, "agent " + std::to_string(i + 1) + " has " +
                         std::to_string(row.size()) + " values, expected " +
                         std::to_string(v.n));
    }
    Rat sum(0), lo = row[0], hi = row[0];
    for (const Rat& x : row) {
      if (x.sign() < 0) {
        return fail(i, "agent " + std::to_string(i + 1) + " has a negative value");
      }
      sum += x;
      lo = min(lo, x);
      hi = max(hi, x);
    }
    if (v.normalization == Normalization::UnitSum && sum != Rat(1)) {
      return fail(i, "agent " + std::to_string(i + 1) + " values sum to " +
                         sum.str() + ", expected 1");
    }
    if (v.normalization == Normalization::UnitRange) {
      if (hi != Rat(1) || lo != Rat(0)) {
        return fail(i, "agent " + std::to_string(i + 1) +
                           " values span [" + lo.str() + ", " + hi.str() +
                           "], expected [0, 1]");
      }
    }
  }
  return {};
}

PreferenceOrder induced_order(const std::vector<Rat>& values, TieRule) {
  int n = static_cast<int>(values.size());
  PreferenceOrder o;
  o.ranking.resize(n);
  std::iota(o.ranking.begin(), o.ranking.end(), 0);
  std::stable_sort(o.ranking.begin(), o.ranking.end(),
                   [&](int a, int b) { return values[b] < values[a]; });
  return o;
}

PreferenceProfile induced_profile(const ValuationProfile& v) {
  PreferenceProfile prefs;
  prefs.reserve(v.n);
  for (const auto& row : v.values) prefs.push_back(induced_order(row));
  return prefs;
}

bool is_permutation_of_items(const std::vector<int>& ranking, int n) {
  if (static_cast<int>(ranking.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int j : ranking) {
    if (j < 0 || j >= n || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

std::vector<PreferenceOrder> all_strict_orders(int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<PreferenceOrder> out;
  out.reserve(factorial(n));
  do {
    out.push_back(PreferenceOrder{perm});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw CapacityError("factorial beyond uint64 range");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

Rat row_utility(const std::vector<Rat>& values, const std::vector<Rat>& probs) {
  if (values.size() != probs.size()) {
    throw ShapeError("utility of rows with different lengths");
  }
  Rat u(0);
  for (size_t j = 0; j < values.size(); ++j) {
    if (!probs[j].is_zero()) u += values[j] * probs[j];
  }
  return u;
}

}  // namespace matchpoa
