#include "matchpoa/equilibrium.hpp"

#include <algorithm>
#include <numeric>

#include "matchpoa/errors.hpp"
#include "matchpoa/rng.hpp"
#include "matchpoa/welfare.hpp"

namespace matchpoa {

namespace {

void require_truth(const ValuationProfile& truth) {
  if (auto res = validate_profile(truth); !res.ok) {
    throw ShapeError("truth profile invalid: " + res.message);
  }
}

void require_strategies(const PreferenceProfile& strategies, int n) {
  if (static_cast<int>(strategies.size()) != n) {
    throw ShapeError("expected " + std::to_string(n) + " strategies, got " +
                     std::to_string(strategies.size()));
  }
  for (int i = 0; i < n; ++i) {
    if (!is_permutation_of_items(strategies[i].ranking, n)) {
      throw ShapeError("strategy of agent " + std::to_string(i + 1) +
                       " is not a permutation of 1.." + std::to_string(n));
    }
  }
}

// Truth row scaled to integer weights over one denominator, so utility
// comparisons inside deviation scans are plain integer arithmetic.
struct ScaledRow {
  std::vector<mpz_class> w;
  mpz_class L;
};

ScaledRow scale_row(const std::vector<Rat>& row) {
  ScaledRow s;
  s.L = 1;
  for (const Rat& x : row) {
    mpz_class d = x.den();
    mpz_lcm(s.L.get_mpz_t(), s.L.get_mpz_t(), d.get_mpz_t());
  }
  s.w.reserve(row.size());
  for (const Rat& x : row) s.w.push_back(x.num() * (s.L / x.den()));
  return s;
}

Rat score_to_rat(const mpz_class& score, const mpz_class& units, const ScaledRow& s) {
  return Rat::from_mpq(mpq_class(score, s.L * units));
}

// Calls f(ranking) for every candidate in lexicographic ranking order.
template <typename F>
void for_each_candidate(const DeviationSpace& space, int n,
                        const PreferenceOrder& current, F&& f) {
  switch (space.kind) {
    case DeviationSpace::Kind::AllStrictOrders: {
      std::vector<int> r(n);
      std::iota(r.begin(), r.end(), 0);
      do {
        f(r);
      } while (std::next_permutation(r.begin(), r.end()));
      return;
    }
    case DeviationSpace::Kind::TopM: {
      if (space.m < 1 || space.m > n) {
        throw ShapeError("top-m deviation space needs 1 <= m <= n");
      }
      std::vector<int> head(current.ranking.begin(), current.ranking.begin() + space.m);
      std::sort(head.begin(), head.end());
      std::vector<int> r = current.ranking;
      do {
        std::copy(head.begin(), head.end(), r.begin());
        f(r);
      } while (std::next_permutation(head.begin(), head.end()));
      return;
    }
    case DeviationSpace::Kind::ExplicitList: {
      std::vector<PreferenceOrder> sorted = space.list;
      for (const auto& o : sorted) {
        if (!is_permutation_of_items(o.ranking, n)) {
          throw ShapeError("explicit deviation list contains a non-permutation");
        }
      }
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (const auto& o : sorted) f(o.ranking);
      return;
    }
  }
  throw DomainError("unknown deviation space");
}

struct MaskCount {
  std::uint32_t mask;
  std::uint64_t count;
};

// One sweep over all n! picking orders under the fixed profile. For each
// agent records how often each set of still-available items occurs at her
// turn. An agent's own report never influences her own availability, so the
// histogram scores any unilateral deviation of that agent exactly.
std::vector<std::vector<MaskCount>> rp_turn_masks(const PreferenceProfile& prefs,
                                                  int cap) {
  const int n = static_cast<int>(prefs.size());
  if (n > cap) {
    throw CapacityError("random priority deviation scan sweeps n! orders; n = " +
                        std::to_string(n) + " exceeds the cap of " +
                        std::to_string(cap) + " (raise the cap)");
  }
  if (n > 16) throw CapacityError("random priority deviation scan needs n <= 16");
  std::vector<std::vector<std::uint64_t>> hist(
      n, std::vector<std::uint64_t>(std::uint64_t{1} << n, 0));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
  do {
    std::uint32_t avail = full;
    for (int i : order) {
      ++hist[i][avail];
      for (int j : prefs[i].ranking) {
        if (avail >> j & 1u) {
          avail &= ~(std::uint32_t{1} << j);
          break;
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));

  std::vector<std::vector<MaskCount>> out(n);
  for (int i = 0; i < n; ++i) {
    for (std::uint32_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if (hist[i][mask] > 0) out[i].push_back({mask, hist[i][mask]});
    }
  }
  return out;
}

mpz_class rp_score(const std::vector<MaskCount>& masks, const std::vector<int>& ranking,
                   const ScaledRow& row) {
  mpz_class score = 0;
  for (const auto& mc : masks) {
    for (int j : ranking) {
      if (mc.mask >> j & 1u) {
        score += row.w[j] * static_cast<unsigned long>(mc.count);
        break;
      }
    }
  }
  return score;
}

// Depth-first scan of all strict orders for one RP agent. Masks are consumed
// by the first prefix item they contain; once none are left every completion
// scores the same, so the branch collapses to its lexicographically smallest
// completion.
class RpAllOrdersScan {
 public:
  RpAllOrdersScan(int n, const ScaledRow& row) : n_(n), row_(row), used_(n, 0) {}

  void run(const std::vector<MaskCount>& masks) {
    prefix_.clear();
    std::fill(used_.begin(), used_.end(), 0);
    dfs(masks, mpz_class(0));
  }

  bool have_best() const { return have_best_; }
  const mpz_class& best_score() const { return best_score_; }
  const std::vector<int>& best_ranking() const { return best_ranking_; }

 private:
  void consider(const mpz_class& score, const std::vector<int>& ranking) {
    if (!have_best_ || score > best_score_) {
      have_best_ = true;
      best_score_ = score;
      best_ranking_ = ranking;
    }
  }

  void dfs(const std::vector<MaskCount>& alive, const mpz_class& score) {
    if (alive.empty()) {
      std::vector<int> ranking = prefix_;
      for (int j = 0; j < n_; ++j) {
        if (!used_[j]) ranking.push_back(j);
      }
      consider(score, ranking);
      return;
    }
    for (int j = 0; j < n_; ++j) {
      if (used_[j]) continue;
      mpz_class s2 = score;
      std::vector<MaskCount> rest;
      rest.reserve(alive.size());
      for (const auto& mc : alive) {
        if (mc.mask >> j & 1u) {
          s2 += row_.w[j] * static_cast<unsigned long>(mc.count);
        } else {
          rest.push_back(mc);
        }
      }
      used_[j] = 1;
      prefix_.push_back(j);
      dfs(rest, s2);
      prefix_.pop_back();
      used_[j] = 0;
    }
  }

  int n_;
  const ScaledRow& row_;
  std::vector<char> used_;
  std::vector<int> prefix_;
  bool have_best_ = false;
  mpz_class best_score_;
  std::vector<int> best_ranking_;
};

// Follower items under random dictatorial depend only on the dictator's
// report, so across deviations only the own-dictator term moves.
mpz_class rd_follower_score(const PreferenceProfile& strategies, int agent,
                            const ScaledRow& row) {
  const int n = static_cast<int>(strategies.size());
  mpz_class base = 0;
  for (int d = 0; d < n; ++d) {
    if (d == agent) continue;
    int slot = agent < d ? agent : agent - 1;  // position among non-dictators
    base += row.w[strategies[d].ranking[slot + 1]];
  }
  return base;
}

int sd_item_of(const PreferenceProfile& strategies, const std::vector<int>& order,
               const std::vector<int>& deviation, int agent) {
  std::uint32_t taken = 0;
  for (int i : order) {
    const std::vector<int>& ranking = i == agent ? deviation : strategies[i].ranking;
    for (int j : ranking) {
      if (!(taken >> j & 1u)) {
        taken |= std::uint32_t{1} << j;
        if (i == agent) return j;
        break;
      }
    }
  }
  throw DomainError("picking order never reached the agent");
}

struct ScanResult {
  PreferenceOrder strategy;
  Rat utility;
  std::uint64_t evaluations = 0;
};

// Exhaustive deviation scan for one agent; other agents fixed. The RP masks
// argument, when present, must come from the same strategy profile.
ScanResult scan_deviations(const Mechanism& mech, const std::vector<Rat>& truth_row,
                           const PreferenceProfile& strategies, int agent,
                           const DeviationSpace& space, const EqOptions& opt,
                           const std::vector<std::vector<MaskCount>>* rp_masks) {
  const int n = static_cast<int>(strategies.size());
  const std::uint64_t size = space.size(n);
  if (size > opt.eval_budget) {
    throw CapacityError("deviation space " + space.describe(n) + " has " +
                        std::to_string(size) + " strategies, over the budget of " +
                        std::to_string(opt.eval_budget));
  }
  if (static_cast<int>(truth_row.size()) != n) {
    throw ShapeError("truth row length differs from profile size");
  }

  ScanResult out;
  out.evaluations = size;
  ScaledRow row = scale_row(truth_row);

  switch (mech.kind) {
    case MechanismKind::RandomPriority: {
      std::vector<std::vector<MaskCount>> local;
      if (rp_masks == nullptr) {
        local = rp_turn_masks(strategies, mech.rp_opt.exact_cap);
        rp_masks = &local;
      }
      const auto& masks = (*rp_masks)[agent];
      const mpz_class units = mpz_class(factorial(n));
      if (space.kind == DeviationSpace::Kind::AllStrictOrders) {
        RpAllOrdersScan scan(n, row);
        scan.run(masks);
        out.strategy = PreferenceOrder{scan.best_ranking()};
        out.utility = score_to_rat(scan.best_score(), units, row);
        return out;
      }
      bool have = false;
      mpz_class best;
      for_each_candidate(space, n, strategies[agent], [&](const std::vector<int>& r) {
        mpz_class score = rp_score(masks, r, row);
        if (!have || score > best) {
          have = true;
          best = score;
          out.strategy = PreferenceOrder{r};
        }
      });
      if (!have) throw DomainError("empty deviation space");
      out.utility = score_to_rat(best, units, row);
      return out;
    }

    case MechanismKind::RandomDictatorial: {
      const mpz_class base = rd_follower_score(strategies, agent, row);
      bool have = false;
      mpz_class best;
      for_each_candidate(space, n, strategies[agent], [&](const std::vector<int>& r) {
        mpz_class score = base + row.w[r[0]];
        if (!have || score > best) {
          have = true;
          best = score;
          out.strategy = PreferenceOrder{r};
        }
      });
      if (!have) throw DomainError("empty deviation space");
      out.utility = score_to_rat(best, mpz_class(n), row);
      return out;
    }

    case MechanismKind::SerialDictatorship: {
      std::vector<int> order = mech.dictator_order;
      if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
      }
      if (!is_permutation_of_items(order, n)) {
        throw ShapeError("picking order is not a permutation of the agents");
      }
      bool have = false;
      mpz_class best;
      for_each_candidate(space, n, strategies[agent], [&](const std::vector<int>& r) {
        mpz_class score = row.w[sd_item_of(strategies, order, r, agent)];
        if (!have || score > best) {
          have = true;
          best = score;
          out.strategy = PreferenceOrder{r};
        }
      });
      if (!have) throw DomainError("empty deviation space");
      out.utility = score_to_rat(best, mpz_class(1), row);
      return out;
    }

    case MechanismKind::ProbabilisticSerial: {
      PreferenceProfile work = strategies;
      bool have = false;
      mpz_class best_num, best_den;  // utility = num / (L * den)
      for_each_candidate(space, n, strategies[agent], [&](const std::vector<int>& r) {
        work[agent].ranking = r;
        mpz_class num, den;
        detail::PsRaw raw = n <= 14 ? detail::ps_raw_int64(work) : detail::PsRaw{};
        if (raw.ok) {
          den = raw.D;
          num = 0;
          for (int j = 0; j < n; ++j) {
            long consumed = static_cast<long>(raw.pnum[static_cast<size_t>(agent) * n + j]);
            if (consumed != 0) num += row.w[j] * consumed;
          }
        } else {
          PsResult res = probabilistic_serial(work);
          Rat u = row_utility(truth_row, res.p.p[agent]);
          num = u.num() * row.L;
          den = u.den();
        }
        // compare num/den against best_num/best_den by cross multiplication
        if (!have || num * best_den > best_num * den) {
          have = true;
          best_num = num;
          best_den = den;
          out.strategy = PreferenceOrder{r};
        }
      });
      if (!have) throw DomainError("empty deviation space");
      out.utility = score_to_rat(best_num, best_den, row);
      return out;
    }

    case MechanismKind::NaiveMaxWelfare:
      throw DomainError("naive max welfare is cardinal; use verify_cardinal_nash");
  }
  throw DomainError("unknown mechanism");
}

}  // namespace

std::uint64_t DeviationSpace::size(int n) const {
  switch (kind) {
    case Kind::AllStrictOrders:
      return factorial(n);
    case Kind::TopM:
      if (m < 1 || m > n) throw ShapeError("top-m deviation space needs 1 <= m <= n");
      return factorial(m);
    case Kind::ExplicitList: {
      std::vector<PreferenceOrder> sorted = list;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      return sorted.size();
    }
  }
  throw DomainError("unknown deviation space");
}

std::string DeviationSpace::describe(int n) const {
  switch (kind) {
    case Kind::AllStrictOrders:
      return "all-strict-orders(" + std::to_string(factorial(n)) + ")";
    case Kind::TopM:
      return "top-" + std::to_string(m) + "-permutations";
    case Kind::ExplicitList:
      return "explicit-list(" + std::to_string(list.size()) + ")";
  }
  throw DomainError("unknown deviation space");
}

std::vector<PreferenceOrder> DeviationSpace::candidates(
    int n, const PreferenceOrder& current) const {
  std::vector<PreferenceOrder> out;
  for_each_candidate(*this, n, current,
                     [&](const std::vector<int>& r) { out.push_back(PreferenceOrder{r}); });
  return out;
}

Rat expected_utility(const Mechanism& mech, const std::vector<Rat>& truth_row,
                     const PreferenceProfile& strategies, int agent) {
  const int n = static_cast<int>(strategies.size());
  require_strategies(strategies, n);
  if (agent < 0 || agent >= n) throw ShapeError("agent index out of range");
  if (static_cast<int>(truth_row.size()) != n) {
    throw ShapeError("truth row length differs from profile size");
  }
  AssignmentMatrix m = run_ordinal(mech, strategies);
  return row_utility(truth_row, m.p[agent]);
}

BestResponse best_response(const Mechanism& mech, const std::vector<Rat>& truth_row,
                           const PreferenceProfile& strategies, int agent,
                           const DeviationSpace& space, const EqOptions& opt) {
  const int n = static_cast<int>(strategies.size());
  require_strategies(strategies, n);
  if (agent < 0 || agent >= n) throw ShapeError("agent index out of range");
  ScanResult r = scan_deviations(mech, truth_row, strategies, agent, space, opt, nullptr);
  return {r.strategy, r.utility, r.evaluations};
}

EquilibriumReport verify_pure_nash(const Mechanism& mech, const ValuationProfile& truth,
                                   const PreferenceProfile& strategies,
                                   const DeviationSpace& space, const Rat& epsilon,
                                   const EqOptions& opt) {
  require_truth(truth);
  const int n = truth.n;
  require_strategies(strategies, n);

  EquilibriumReport report;
  report.profile = strategies;
  report.deviation_space = space.describe(n);
  report.epsilon = epsilon;

  AssignmentMatrix outcome = run_ordinal(mech, strategies);
  std::vector<Rat> current(n);
  report.welfare = Rat(0);
  for (int i = 0; i < n; ++i) {
    current[i] = row_utility(truth.values[i], outcome.p[i]);
    report.welfare += current[i];
  }

  std::vector<std::vector<MaskCount>> masks;
  const std::vector<std::vector<MaskCount>>* masks_ptr = nullptr;
  if (mech.kind == MechanismKind::RandomPriority) {
    masks = rp_turn_masks(strategies, mech.rp_opt.exact_cap);
    masks_ptr = &masks;
  }

  bool have_gain = false;
  for (int i = 0; i < n; ++i) {
    ScanResult r = scan_deviations(mech, truth.values[i], strategies, i, space, opt,
                                   masks_ptr);
    Rat gain = r.utility - current[i];
    if (!have_gain || gain > report.max_gain) {
      have_gain = true;
      report.max_gain = gain;
      report.witness = Deviation{i, r.strategy, gain};
    }
  }
  report.verified = report.max_gain <= epsilon;
  if (report.verified) report.witness.reset();
  return report;
}

std::vector<EquilibriumReport> enumerate_pure_nash(const Mechanism& mech,
                                                   const ValuationProfile& truth,
                                                   const Rat& epsilon,
                                                   const EnumerateOptions& opt) {
  require_truth(truth);
  if (!mech.ordinal()) {
    throw DomainError("enumeration runs over ordinal strategy profiles");
  }
  const int n = truth.n;
  const std::uint64_t K = factorial(n);
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > opt.profile_budget / K + 1) {
      total = opt.profile_budget + 1;
      break;
    }
    total *= K;
  }
  if (total > opt.profile_budget) {
    throw CapacityError("profile space (n!)^n exceeds the enumeration budget of " +
                        std::to_string(opt.profile_budget) +
                        "; use best_response_dynamics");
  }

  const std::vector<PreferenceOrder> orders = all_strict_orders(n);

  // max utility each agent can reach for every configuration of the others
  std::vector<std::vector<Rat>> best(n);
  std::vector<std::vector<char>> seen(n);
  const std::uint64_t rest_total = total / K;
  for (int i = 0; i < n; ++i) {
    best[i].assign(rest_total, Rat(0));
    seen[i].assign(rest_total, 0);
  }

  std::vector<std::uint32_t> digit(n, 0);
  PreferenceProfile strategies(n);
  auto rebuild = [&]() {
    for (int i = 0; i < n; ++i) strategies[i] = orders[digit[i]];
  };
  auto rest_key = [&](int i) {
    std::uint64_t key = 0;
    for (int a = 0; a < n; ++a) {
      if (a == i) continue;
      key = key * K + digit[a];
    }
    return key;
  };
  auto utilities = [&](std::vector<Rat>& u) {
    AssignmentMatrix m = run_ordinal(mech, strategies);
    for (int i = 0; i < n; ++i) u[i] = row_utility(truth.values[i], m.p[i]);
  };
  auto advance = [&]() {
    for (int i = n - 1; i >= 0; --i) {
      if (++digit[i] < K) return true;
      digit[i] = 0;
    }
    return false;
  };

  std::vector<Rat> u(n);
  do {
    rebuild();
    utilities(u);
    for (int i = 0; i < n; ++i) {
      std::uint64_t key = rest_key(i);
      if (!seen[i][key] || u[i] > best[i][key]) {
        seen[i][key] = 1;
        best[i][key] = u[i];
      }
    }
  } while (advance());

  std::vector<EquilibriumReport> found;
  std::fill(digit.begin(), digit.end(), 0);
  do {
    rebuild();
    utilities(u);
    Rat max_gain(0);
    bool ne = true;
    for (int i = 0; i < n; ++i) {
      Rat gain = best[i][rest_key(i)] - u[i];
      max_gain = max(max_gain, gain);
      if (gain > epsilon) {
        ne = false;
        break;
      }
    }
    if (ne) {
      EquilibriumReport r;
      r.profile = strategies;
      r.verified = true;
      r.deviation_space = DeviationSpace::all().describe(n);
      r.epsilon = epsilon;
      r.max_gain = max_gain;
      r.welfare = Rat(0);
      for (int i = 0; i < n; ++i) r.welfare += u[i];
      found.push_back(std::move(r));
    }
  } while (advance());
  return found;
}

BrdResult best_response_dynamics(const Mechanism& mech, const ValuationProfile& truth,
                                 PreferenceProfile init, const BrdOptions& opt) {
  require_truth(truth);
  const int n = truth.n;
  require_strategies(init, n);

  BrdResult res;
  res.profile = std::move(init);
  Rng rng(opt.seed);
  const DeviationSpace space = DeviationSpace::all();

  for (int pass = 1; pass <= opt.max_passes; ++pass) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (opt.order == AgentOrder::SeededRandom) rng.shuffle(order);

    bool changed = false;
    for (int i : order) {
      Rat cur = expected_utility(mech, truth.values[i], res.profile, i);
      BestResponse br = best_response(mech, truth.values[i], res.profile, i, space, opt.eq);
      res.evaluations += br.evaluations;
      if (br.utility > cur + opt.epsilon) {
        res.profile[i] = br.strategy;
        changed = true;
      }
    }
    res.passes = pass;
    if (!changed) {
      res.converged = true;
      break;
    }
  }

  res.report = verify_pure_nash(mech, truth, res.profile, space, opt.epsilon, opt.eq);
  return res;
}

std::uint64_t GridSpace::rows(int n) const {
  if (n < 1 || D < 1) throw ShapeError("grid space needs n >= 1 and D >= 1");
  // C(D + n - 1, n - 1) compositions of D into n nonnegative parts
  std::uint64_t r = 1;
  for (int i = 1; i < n; ++i) {
    r = r * static_cast<std::uint64_t>(D + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::vector<std::vector<Rat>> GridSpace::all_rows(int n) const {
  std::vector<std::vector<Rat>> out;
  std::vector<int> parts(n, 0);
  // lexicographic enumeration of numerator tuples summing to D
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      parts[pos] = left;
      std::vector<Rat> row;
      row.reserve(n);
      for (int x : parts) row.push_back(Rat(x, D));
      out.push_back(std::move(row));
      return;
    }
    for (int x = 0; x <= left; ++x) {
      parts[pos] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, D);
  return out;
}

std::string GridSpace::describe(int n) const {
  return "grid(D=" + std::to_string(D) + ", rows=" + std::to_string(rows(n)) + ")";
}

CardinalEquilibriumReport verify_cardinal_nash(const ValuationProfile& truth,
                                               const std::vector<std::vector<Rat>>& reports,
                                               const GridSpace& space, const Rat& epsilon,
                                               const EqOptions& opt) {
  require_truth(truth);
  const int n = truth.n;
  if (static_cast<int>(reports.size()) != n) {
    throw ShapeError("expected " + std::to_string(n) + " report rows");
  }
  for (const auto& row : reports) {
    if (static_cast<int>(row.size()) != n) {
      throw ShapeError("report rows must have length " + std::to_string(n));
    }
  }
  if (space.rows(n) > opt.eval_budget) {
    throw CapacityError("cardinal grid " + space.describe(n) +
                        " exceeds the budget of " + std::to_string(opt.eval_budget));
  }

  CardinalEquilibriumReport report;
  report.reports = reports;
  report.deviation_space = space.describe(n);
  report.epsilon = epsilon;

  ValuationProfile current{n, reports, Normalization::Unchecked};
  Matching mu = naive_max_welfare(current);
  std::vector<Rat> cur_util(n);
  report.welfare = Rat(0);
  for (int i = 0; i < n; ++i) {
    cur_util[i] = truth.values[i][mu.item_of[i]];
    report.welfare += cur_util[i];
  }

  const auto rows = space.all_rows(n);
  bool have_gain = false;
  ValuationProfile work = current;
  for (int i = 0; i < n; ++i) {
    for (const auto& row : rows) {
      work.values[i] = row;
      Matching dev = naive_max_welfare(work);
      Rat gain = truth.values[i][dev.item_of[i]] - cur_util[i];
      if (!have_gain || gain > report.max_gain) {
        have_gain = true;
        report.max_gain = gain;
        report.witness = CardinalDeviation{i, row, gain};
      }
    }
    work.values[i] = reports[i];
  }
  report.verified = report.max_gain <= epsilon;
  if (report.verified) report.witness.reset();
  return report;
}

}  // namespace matchpoa
