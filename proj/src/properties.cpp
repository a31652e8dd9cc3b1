#include "matchpoa/properties.hpp"

#include <algorithm>
#include <numeric>

#include "matchpoa/equilibrium.hpp"
#include "matchpoa/errors.hpp"

namespace matchpoa {

namespace {

void require_distribution(const std::vector<Rat>& p, const char* name) {
  Rat sum(0);
  for (const Rat& x : p) {
    if (x < Rat(0)) throw DomainError(std::string(name) + " has a negative entry");
    sum += x;
  }
  if (sum != Rat(1)) {
    throw DomainError(std::string(name) + " sums to " + sum.str() + ", not 1");
  }
}

// Enumerates profiles from the source; f(index, profile) for each (1-based).
template <typename F>
void for_each_profile(const ProfileSource& source, F&& f) {
  switch (source.kind) {
    case ProfileSource::Kind::Exhaustive: {
      const int n = source.n;
      const std::uint64_t K = factorial(n);
      std::uint64_t total = 1;
      for (int i = 0; i < n; ++i) {
        if (total > 2'000'000 / K) {
          throw CapacityError("exhaustive profile space (n!)^n too large at n = " +
                              std::to_string(n) + "; use a random source");
        }
        total *= K;
      }
      const auto orders = all_strict_orders(n);
      std::vector<std::uint32_t> digit(n, 0);
      PreferenceProfile prof(n);
      std::uint64_t idx = 0;
      for (;;) {
        for (int i = 0; i < n; ++i) prof[i] = orders[digit[i]];
        f(++idx, prof);
        int i = n - 1;
        while (i >= 0 && ++digit[i] == K) digit[i--] = 0;
        if (i < 0) break;
      }
      return;
    }
    case ProfileSource::Kind::Random: {
      Rng rng(source.seed);
      for (std::uint64_t k = 1; k <= source.count; ++k) {
        f(k, random_preference_profile(source.n, rng));
      }
      return;
    }
    case ProfileSource::Kind::Explicit: {
      std::uint64_t idx = 0;
      for (const auto& prof : source.profiles) f(++idx, prof);
      return;
    }
  }
  throw DomainError("unknown profile source");
}

std::string row_str(const std::vector<Rat>& row) {
  std::string s = "(";
  for (size_t j = 0; j < row.size(); ++j) {
    if (j) s += ",";
    s += row[j].str();
  }
  return s + ")";
}

}  // namespace

bool sd_dominates(const PreferenceOrder& order, const std::vector<Rat>& p,
                  const std::vector<Rat>& q) {
  const int n = static_cast<int>(order.ranking.size());
  if (!is_permutation_of_items(order.ranking, n)) {
    throw DomainError("sd comparison needs a strict order");
  }
  if (static_cast<int>(p.size()) != n || static_cast<int>(q.size()) != n) {
    throw DomainError("sd comparison needs vectors of length " + std::to_string(n));
  }
  require_distribution(p, "p");
  require_distribution(q, "q");
  Rat pp(0), qq(0);
  for (int k = 0; k < n; ++k) {
    pp += p[order.ranking[k]];
    qq += q[order.ranking[k]];
    if (pp < qq) return false;
  }
  return true;
}

ProfileSource ProfileSource::exhaustive(int n) {
  ProfileSource s;
  s.kind = Kind::Exhaustive;
  s.n = n;
  return s;
}

ProfileSource ProfileSource::random(int n, std::uint64_t count, std::uint64_t seed) {
  ProfileSource s;
  s.kind = Kind::Random;
  s.n = n;
  s.count = count;
  s.seed = seed;
  return s;
}

ProfileSource ProfileSource::explicit_profiles(std::vector<PreferenceProfile> profiles) {
  ProfileSource s;
  s.kind = Kind::Explicit;
  s.profiles = std::move(profiles);
  if (!s.profiles.empty()) s.n = static_cast<int>(s.profiles[0].size());
  return s;
}

OpponentSpace OpponentSpace::exhaustive(int cap) {
  OpponentSpace s;
  s.kind = Kind::Exhaustive;
  s.cap = cap;
  return s;
}

OpponentSpace OpponentSpace::sampled(std::uint64_t count, std::uint64_t seed) {
  OpponentSpace s;
  s.kind = Kind::Sampled;
  s.count = count;
  s.seed = seed;
  return s;
}

PropertyReport check_envy_free(const Mechanism& mech, const ProfileSource& source) {
  if (!mech.ordinal()) throw DomainError("envy-freeness check needs an ordinal mechanism");
  PropertyReport report;
  report.property = "envy-free";
  report.seed = source.seed;
  report.exhaustive = source.kind == ProfileSource::Kind::Exhaustive;
  report.mode = report.exhaustive ? "exhaustive"
                : source.kind == ProfileSource::Kind::Random ? "random"
                                                             : "explicit";
  for_each_profile(source, [&](std::uint64_t idx, const PreferenceProfile& prof) {
    ++report.instances;
    const int n = static_cast<int>(prof.size());
    AssignmentMatrix m = run_ordinal(mech, prof);
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        if (!sd_dominates(prof[i], m.p[i], m.p[r])) {
          report.violations.push_back(
              {idx, "agent " + std::to_string(i + 1) + " envies agent " +
                        std::to_string(r + 1) + ": rows " + row_str(m.p[i]) + " vs " +
                        row_str(m.p[r])});
        }
      }
    }
  });
  return report;
}

PropertyReport check_safe_strategy(const Mechanism& mech, int agent,
                                   const PreferenceOrder& strategy,
                                   const PreferenceOrder& true_order,
                                   const OpponentSpace& space) {
  if (!mech.ordinal()) throw DomainError("safe-strategy check needs an ordinal mechanism");
  const int n = static_cast<int>(strategy.ranking.size());
  if (!is_permutation_of_items(strategy.ranking, n) ||
      !is_permutation_of_items(true_order.ranking, n)) {
    throw ShapeError("strategy and true order must be permutations of 1.." +
                     std::to_string(n));
  }
  if (agent < 0 || agent >= n) throw ShapeError("agent index out of range");

  PropertyReport report;
  report.property = "safe-strategy";
  report.seed = space.seed;
  report.exhaustive = space.kind == OpponentSpace::Kind::Exhaustive;
  report.mode = report.exhaustive ? "exhaustive" : "random";

  const std::vector<Rat> uniform(n, Rat(1, n));
  PreferenceProfile prof(n);
  prof[agent] = strategy;
  auto test_current = [&](std::uint64_t idx) {
    ++report.instances;
    AssignmentMatrix m = run_ordinal(mech, prof);
    if (!sd_dominates(true_order, m.p[agent], uniform)) {
      std::string opp = "opponents";
      for (int r = 0; r < n; ++r) {
        if (r == agent) continue;
        opp += " (";
        for (size_t k = 0; k < prof[r].ranking.size(); ++k) {
          if (k) opp += ",";
          opp += std::to_string(prof[r].ranking[k] + 1);
        }
        opp += ")";
      }
      report.violations.push_back({idx, "row " + row_str(m.p[agent]) + " fails against " + opp});
    }
  };

  if (space.kind == OpponentSpace::Kind::Exhaustive) {
    if (n > space.cap) {
      throw CapacityError("exhaustive opponent space has (n!)^(n-1) profiles; n = " +
                          std::to_string(n) + " exceeds the cap of " +
                          std::to_string(space.cap));
    }
    const auto orders = all_strict_orders(n);
    const std::uint64_t K = orders.size();
    std::vector<std::uint32_t> digit(n > 1 ? n - 1 : 0, 0);
    std::uint64_t idx = 0;
    for (;;) {
      int pos = 0;
      for (int r = 0; r < n; ++r) {
        if (r != agent) prof[r] = orders[digit[pos++]];
      }
      test_current(++idx);
      int i = static_cast<int>(digit.size()) - 1;
      while (i >= 0 && ++digit[i] == K) digit[i--] = 0;
      if (i < 0) break;
    }
  } else {
    Rng rng(space.seed);
    for (std::uint64_t k = 1; k <= space.count; ++k) {
      for (int r = 0; r < n; ++r) {
        if (r != agent) prof[r] = PreferenceOrder{rng.permutation(n)};
      }
      test_current(k);
    }
  }
  return report;
}

std::vector<Rat> random_unit_sum_row(int n, int grid, Rng& rng) {
  if (n < 1 || grid < 1) throw ShapeError("unit-sum row needs n >= 1 and grid >= 1");
  std::vector<long long> draw(n);
  long long total = 0;
  for (int j = 0; j < n; ++j) {
    draw[j] = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(grid)));
    total += draw[j];
  }
  std::vector<Rat> row(n);
  for (int j = 0; j < n; ++j) row[j] = Rat(draw[j], total);
  return row;
}

ValuationProfile random_unit_sum_profile(int n, int grid, Rng& rng) {
  ValuationProfile prof;
  prof.n = n;
  prof.normalization = Normalization::UnitSum;
  prof.values.reserve(n);
  for (int i = 0; i < n; ++i) prof.values.push_back(random_unit_sum_row(n, grid, rng));
  return prof;
}

PreferenceProfile random_preference_profile(int n, Rng& rng) {
  PreferenceProfile prof(n);
  for (int i = 0; i < n; ++i) prof[i] = PreferenceOrder{rng.permutation(n)};
  return prof;
}

std::vector<PropertyReport> ps_bounds_suite(const RandomInstances& source) {
  if (source.n_min < 1 || source.n_max < source.n_min) {
    throw ShapeError("ps bounds suite needs 1 <= n_min <= n_max");
  }

  PropertyReport quarter, floor_t, truthful, eq_floor;
  quarter.property = "quarter-time";
  floor_t.property = "time-floor";
  truthful.property = "truthful-dominance";
  eq_floor.property = "equilibrium-floor";
  for (PropertyReport* r : {&quarter, &floor_t, &truthful, &eq_floor}) {
    r->mode = "random";
    r->seed = source.seed;
  }

  Rng rng(source.seed);
  const int span = source.n_max - source.n_min + 1;

  for (std::uint64_t k = 1; k <= source.count; ++k) {
    const int n = source.n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    PreferenceProfile prof = random_preference_profile(n, rng);
    PsResult base = probabilistic_serial(prof);

    // (a) moving any item to the top keeps at least a quarter of its time;
    // every (agent, item) move counts as one tested pair
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ++quarter.instances;
        PreferenceProfile dev = prof;
        auto& r = dev[i].ranking;
        r.erase(std::find(r.begin(), r.end(), j));
        r.insert(r.begin(), j);
        PsResult moved = probabilistic_serial(dev);
        if (moved.times.t[j] * Rat(4) < base.times.t[j]) {
          quarter.violations.push_back(
              {k, "agent " + std::to_string(i + 1) + " tops item " + std::to_string(j + 1) +
                      ": t drops " + base.times.t[j].str() + " -> " +
                      moved.times.t[j].str()});
        }
      }
    }

    // (c) ascending-sorted exhaustion times stay above j/n
    ++floor_t.instances;
    std::vector<Rat> sorted = base.times.t;
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < n; ++j) {
      if (sorted[j] < Rat(j + 1, n)) {
        floor_t.violations.push_back({k, "sorted t_" + std::to_string(j + 1) + " = " +
                                             sorted[j].str() + " below " +
                                             Rat(j + 1, n).str()});
      }
    }

    // (d) a truthful agent's prefix sums dominate the uniform lottery
    ++truthful.instances;
    for (int i = 0; i < n; ++i) {
      Rat prefix(0);
      for (int pos = 0; pos < n; ++pos) {
        prefix += base.p.p[i][prof[i].ranking[pos]];
        if (prefix < Rat(pos + 1, n)) {
          truthful.violations.push_back(
              {k, "agent " + std::to_string(i + 1) + " prefix " + std::to_string(pos + 1) +
                      " = " + prefix.str() + " below " + Rat(pos + 1, n).str()});
        }
      }
    }
  }

  // (b) equilibrium utilities: enumerate outright when feasible, otherwise
  // search by best-response dynamics; only verified profiles are checked
  Rng eq_rng(split_seed(source.seed, 1));
  for (std::uint64_t k = 1; k <= source.count; ++k) {
    const int n = source.n_min + static_cast<int>(eq_rng.below(static_cast<std::uint64_t>(span)));
    ValuationProfile truth = random_unit_sum_profile(n, source.grid, eq_rng);
    std::vector<EquilibriumReport> found;
    if (n <= 3) {
      found = enumerate_pure_nash(Mechanism::ps(), truth, Rat(0), {});
    } else {
      PreferenceProfile init(n);
      for (int i = 0; i < n; ++i) init[i] = induced_order(truth.values[i]);
      BrdOptions bopt;
      bopt.seed = split_seed(source.seed, 1000 + k);
      BrdResult brd = best_response_dynamics(Mechanism::ps(), truth, init, bopt);
      if (brd.report && brd.report->verified) found.push_back(*brd.report);
    }
    if (found.empty()) continue;
    ++eq_floor.instances;
    for (const auto& eq : found) {
      PsResult res = probabilistic_serial(eq.profile);
      for (int i = 0; i < n; ++i) {
        Rat u = row_utility(truth.values[i], res.p.p[i]);
        for (int j = 0; j < n; ++j) {
          if (u * Rat(4) < res.times.t[j] * truth.values[i][j]) {
            eq_floor.violations.push_back(
                {k, "agent " + std::to_string(i + 1) + " utility " + u.str() +
                        " below t_" + std::to_string(j + 1) + "/4 * u_ij = (" +
                        res.times.t[j].str() + "/4)*" + truth.values[i][j].str()});
          }
        }
      }
    }
  }

  return {quarter, eq_floor, floor_t, truthful};
}

}  // namespace matchpoa
