#include "matchpoa/welfare.hpp"

#include <algorithm>

#include "matchpoa/errors.hpp"

namespace matchpoa {

namespace {

void require_square(const std::vector<std::vector<Rat>>& w) {
  size_t n = w.size();
  if (n == 0) throw ShapeError("empty weight matrix");
  for (const auto& row : w) {
    if (row.size() != n) throw ShapeError("weight matrix is not square");
  }
}

struct HungarianResult {
  std::vector<int> match;  // column matched to each row
  std::vector<Rat> u, v;   // dual potentials, 1-based like the working arrays
};

// Hungarian algorithm with potentials, minimizing exact rational cost.
// On return the potentials are dual feasible (u_i + v_j <= a_ij everywhere)
// and every matched edge is tight.
HungarianResult assign_min_cost(const std::vector<std::vector<Rat>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<Rat> u(n + 1, Rat(0)), v(n + 1, Rat(0)), minv(n + 1, Rat(0));
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<char> unseen(n + 1, 1), used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      Rat delta(0);
      bool have_delta = false;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        Rat cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (unseen[j] || cur < minv[j]) {
          minv[j] = cur;
          unseen[j] = 0;
          way[j] = j0;
        }
        if (!unseen[j] && (!have_delta || minv[j] < delta)) {
          delta = minv[j];
          have_delta = true;
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else if (!unseen[j]) {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  HungarianResult res;
  res.match.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) res.match[p[j] - 1] = j - 1;
  }
  res.u = std::move(u);
  res.v = std::move(v);
  return res;
}

std::vector<std::vector<Rat>> negate(const std::vector<std::vector<Rat>>& w) {
  std::vector<std::vector<Rat>> cost(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    cost[i].reserve(w.size());
    for (const Rat& x : w[i]) cost[i].push_back(-x);
  }
  return cost;
}

Rat max_value_in(const std::vector<std::vector<Rat>>& w) {
  auto res = assign_min_cost(negate(w));
  Rat total(0);
  for (size_t i = 0; i < w.size(); ++i) total += w[i][res.match[i]];
  return total;
}

// Kuhn augmenting search on a boolean adjacency: can `row` be matched?
// Columns held by rows below `locked_below` are frozen and never rematched.
bool try_match(int row, const std::vector<std::vector<char>>& adj, int locked_below,
               std::vector<char>& visited, std::vector<int>& col_to_row) {
  int n = static_cast<int>(adj.size());
  for (int j = 0; j < n; ++j) {
    if (!adj[row][j] || visited[j]) continue;
    if (col_to_row[j] >= 0 && col_to_row[j] < locked_below) continue;
    visited[j] = 1;
    if (col_to_row[j] < 0 ||
        try_match(col_to_row[j], adj, locked_below, visited, col_to_row)) {
      col_to_row[j] = row;
      return true;
    }
  }
  return false;
}

// Whether rows from..n-1 can all be matched within the adjacency while the
// columns assigned to rows 0..from-1 stay fixed.
bool completable(const std::vector<std::vector<char>>& adj, int from,
                 std::vector<int> col_to_row) {
  int n = static_cast<int>(adj.size());
  std::vector<char> visited(n, 0);
  for (int r = from; r < n; ++r) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!try_match(r, adj, from, visited, col_to_row)) return false;
  }
  return true;
}

}  // namespace

Rat social_welfare(const ValuationProfile& truth, const AssignmentMatrix& p) {
  if (p.n() != truth.n) throw ShapeError("assignment size differs from profile");
  Rat total(0);
  for (int i = 0; i < truth.n; ++i) total += row_utility(truth.values[i], p.p[i]);
  return total;
}

Rat social_welfare(const ValuationProfile& truth, const Matching& mu) {
  if (static_cast<int>(mu.item_of.size()) != truth.n) {
    throw ShapeError("matching size differs from profile");
  }
  Rat total(0);
  for (int i = 0; i < truth.n; ++i) total += truth.values[i][mu.item_of[i]];
  return total;
}

Rat max_weight_value(const std::vector<std::vector<Rat>>& w) {
  require_square(w);
  return max_value_in(w);
}

OptResult optimal_matching(const ValuationProfile& v) {
  const auto& w = v.values;
  require_square(w);
  const int n = v.n;
  auto cost = negate(w);
  auto res = assign_min_cost(cost);

  OptResult out;
  out.welfare = Rat(0);
  for (int i = 0; i < n; ++i) out.welfare += w[i][res.match[i]];

  // By complementary slackness the maximizing matchings are exactly the
  // perfect matchings of the tight-edge graph, so the lexicographically
  // smallest one can be fixed greedily with a feasibility probe per item.
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Rat slack = cost[i][j] - res.u[i + 1] - res.v[j + 1];
      if (slack.sign() < 0) throw Error("dual potentials lost feasibility");
      tight[i][j] = slack.is_zero();
    }
  }

  out.mu.item_of.assign(n, -1);
  std::vector<int> col_to_row(n, -1);
  for (int i = 0; i < n; ++i) {
    bool fixed = false;
    for (int j = 0; j < n; ++j) {
      if (!tight[i][j] || col_to_row[j] >= 0) continue;
      col_to_row[j] = i;
      if (completable(tight, i + 1, col_to_row)) {
        out.mu.item_of[i] = j;
        fixed = true;
        break;
      }
      col_to_row[j] = -1;
    }
    if (!fixed) throw Error("tight graph lost a perfect matching");
  }
  return out;
}

AnarchyRatios anarchy_ratios(const std::vector<Rat>& equilibrium_welfares,
                             const Rat& opt) {
  if (equilibrium_welfares.empty()) {
    throw DomainError("anarchy ratios of an empty equilibrium set");
  }
  Rat worst = equilibrium_welfares[0], best = equilibrium_welfares[0];
  for (const Rat& w : equilibrium_welfares) {
    worst = min(worst, w);
    best = max(best, w);
  }
  if (worst.sign() <= 0) {
    throw DomainError("anarchy ratios need strictly positive equilibrium welfare");
  }
  return {opt / worst, opt / best};
}

}  // namespace matchpoa
