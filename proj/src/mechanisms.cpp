#include "matchpoa/mechanisms.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

#include "matchpoa/errors.hpp"
#include "matchpoa/rng.hpp"
#include "matchpoa/welfare.hpp"

namespace matchpoa {

namespace {

void require_profile(const PreferenceProfile& prefs) {
  int n = static_cast<int>(prefs.size());
  if (n == 0) throw ShapeError("empty preference profile");
  for (int i = 0; i < n; ++i) {
    if (!is_permutation_of_items(prefs[i].ranking, n)) {
      throw ShapeError("agent " + std::to_string(i + 1) +
                       " ranking is not a permutation of 1.." + std::to_string(n));
    }
  }
}

}  // namespace

namespace detail {

// Event-driven eating with one running int64 common denominator D. Every
// tracked numerator stays at most D, so one guard at the top of each event
// keeps all products in range; on overflow risk we bail out and the caller
// reruns with arbitrary precision. D grows by the eater count of the
// exhausted item per event, so n <= 14 always stays inside int64.
PsRaw ps_raw_int64(const PreferenceProfile& prefs) {
  const int n = static_cast<int>(prefs.size());
  const std::int64_t guard =
      std::numeric_limits<std::int64_t>::max() / (2 * (n + 1));

  PsRaw out;
  std::int64_t tcur = 0;
  out.D = 1;
  out.pnum.assign(static_cast<size_t>(n) * n, 0);
  out.tnum.assign(n, 0);
  std::vector<std::int64_t> rem(n, 1);
  std::vector<int> ptr(n, 0), cur(n, 0), cnt(n, 0);
  std::vector<char> gone(n, 0);
  int alive = n;

  while (alive > 0) {
    if (out.D > guard) return out;
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int i = 0; i < n; ++i) {
      while (gone[prefs[i].ranking[ptr[i]]]) ++ptr[i];
      cur[i] = prefs[i].ranking[ptr[i]];
      ++cnt[cur[i]];
    }
    int m = -1;
    for (int j = 0; j < n; ++j) {
      if (cnt[j] == 0) continue;
      if (m < 0 || rem[j] * cnt[m] < rem[m] * cnt[j]) m = j;
    }
    const std::int64_t dt = rem[m];
    const std::int64_t c = cnt[m];
    if (c > 1) {
      for (auto& x : rem) x *= c;
      for (auto& x : out.pnum) x *= c;
      for (auto& x : out.tnum) x *= c;
      tcur *= c;
      out.D *= c;
    }
    for (int j = 0; j < n; ++j) {
      if (cnt[j] > 0) rem[j] -= cnt[j] * dt;
    }
    for (int i = 0; i < n; ++i) out.pnum[static_cast<size_t>(i) * n + cur[i]] += dt;
    tcur += dt;
    for (int j = 0; j < n; ++j) {
      if (!gone[j] && rem[j] == 0) {
        gone[j] = 1;
        out.tnum[j] = tcur;
        --alive;
      }
    }
  }
  out.ok = true;
  return out;
}

}  // namespace detail

namespace {

void eat_exact(const PreferenceProfile& prefs, PsResult& out) {
  const int n = static_cast<int>(prefs.size());
  Rat t(0);
  std::vector<Rat> rem(n, Rat(1));
  std::vector<std::vector<Rat>> p(n, std::vector<Rat>(n, Rat(0)));
  std::vector<int> ptr(n, 0), cur(n, 0), cnt(n, 0);
  std::vector<char> gone(n, 0);
  out.times.t.assign(n, Rat(0));
  int alive = n;

  while (alive > 0) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int i = 0; i < n; ++i) {
      while (gone[prefs[i].ranking[ptr[i]]]) ++ptr[i];
      cur[i] = prefs[i].ranking[ptr[i]];
      ++cnt[cur[i]];
    }
    int m = -1;
    Rat best(0);
    for (int j = 0; j < n; ++j) {
      if (cnt[j] == 0) continue;
      Rat dt = rem[j] / Rat(cnt[j]);
      if (m < 0 || dt < best) {
        m = j;
        best = dt;
      }
    }
    for (int j = 0; j < n; ++j) {
      if (cnt[j] > 0) rem[j] -= Rat(cnt[j]) * best;
    }
    for (int i = 0; i < n; ++i) p[i][cur[i]] += best;
    t += best;
    for (int j = 0; j < n; ++j) {
      if (!gone[j] && rem[j].is_zero()) {
        gone[j] = 1;
        out.times.t[j] = t;
        --alive;
      }
    }
  }
  out.p.p = std::move(p);
  out.p.sampled.reset();
}

}  // namespace

PsResult probabilistic_serial(const PreferenceProfile& prefs) {
  require_profile(prefs);
  PsResult out;
  const int n = static_cast<int>(prefs.size());
  if (n <= 14) {
    detail::PsRaw raw = detail::ps_raw_int64(prefs);
    if (raw.ok) {
      out.p.p.assign(n, std::vector<Rat>(n));
      out.times.t.resize(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          out.p.p[i][j] = Rat(raw.pnum[static_cast<size_t>(i) * n + j], raw.D);
        }
      }
      for (int j = 0; j < n; ++j) out.times.t[j] = Rat(raw.tnum[j], raw.D);
      return out;
    }
  }
  eat_exact(prefs, out);
  return out;
}

Matching serial_dictatorship(const PreferenceProfile& prefs,
                             const std::vector<int>& agent_order) {
  require_profile(prefs);
  int n = static_cast<int>(prefs.size());
  if (!is_permutation_of_items(agent_order, n)) {
    throw ShapeError("picking order is not a permutation of the agents");
  }
  Matching mu;
  mu.item_of.assign(n, -1);
  std::vector<char> taken(n, 0);
  for (int i : agent_order) {
    for (int j : prefs[i].ranking) {
      if (!taken[j]) {
        taken[j] = 1;
        mu.item_of[i] = j;
        break;
      }
    }
  }
  return mu;
}

AssignmentMatrix random_priority_exact(const PreferenceProfile& prefs,
                                       const RpOptions& opt) {
  require_profile(prefs);
  int n = static_cast<int>(prefs.size());
  if (n > opt.exact_cap) {
    throw CapacityError("exact random priority averages n! orders; n = " +
                        std::to_string(n) + " exceeds the cap of " +
                        std::to_string(opt.exact_cap) +
                        " (raise the cap or sample)");
  }
  std::vector<std::uint64_t> count(static_cast<size_t>(n) * n, 0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<char> taken(n, 0);
  do {
    std::fill(taken.begin(), taken.end(), 0);
    for (int i : order) {
      for (int j : prefs[i].ranking) {
        if (!taken[j]) {
          taken[j] = 1;
          ++count[static_cast<size_t>(i) * n + j];
          break;
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));

  const std::int64_t total = static_cast<std::int64_t>(factorial(n));
  AssignmentMatrix m;
  m.p.assign(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.p[i][j] = Rat(static_cast<std::int64_t>(count[static_cast<size_t>(i) * n + j]), total);
    }
  }
  return m;
}

AssignmentMatrix random_priority_sampled(const PreferenceProfile& prefs,
                                         std::uint64_t seed,
                                         std::uint64_t trials) {
  require_profile(prefs);
  if (trials == 0) throw DomainError("sampled random priority needs at least one trial");
  int n = static_cast<int>(prefs.size());
  std::vector<std::uint64_t> count(static_cast<size_t>(n) * n, 0);
  Rng rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<char> taken(n, 0);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    rng.shuffle(order);
    std::fill(taken.begin(), taken.end(), 0);
    for (int i : order) {
      for (int j : prefs[i].ranking) {
        if (!taken[j]) {
          taken[j] = 1;
          ++count[static_cast<size_t>(i) * n + j];
          break;
        }
      }
    }
  }
  AssignmentMatrix m;
  m.p.assign(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.p[i][j] = Rat(static_cast<std::int64_t>(count[static_cast<size_t>(i) * n + j]),
                      static_cast<std::int64_t>(trials));
    }
  }
  m.sampled = SampleInfo{seed, trials};
  return m;
}

// The dictator takes the top item of her report; the remaining agents, by
// ascending index, receive the remaining items in the order they appear in
// the dictator's ranking. Followers' reports play no role.
AssignmentMatrix random_dictatorial(const PreferenceProfile& prefs) {
  require_profile(prefs);
  int n = static_cast<int>(prefs.size());
  std::vector<std::uint64_t> count(static_cast<size_t>(n) * n, 0);
  for (int d = 0; d < n; ++d) {
    ++count[static_cast<size_t>(d) * n + prefs[d].ranking[0]];
    int pos = 1;
    for (int i = 0; i < n; ++i) {
      if (i == d) continue;
      ++count[static_cast<size_t>(i) * n + prefs[d].ranking[pos]];
      ++pos;
    }
  }
  AssignmentMatrix m;
  m.p.assign(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.p[i][j] = Rat(static_cast<std::int64_t>(count[static_cast<size_t>(i) * n + j]), n);
    }
  }
  return m;
}

Matching naive_max_welfare(const ValuationProfile& reports) {
  return optimal_matching(reports).mu;
}

std::string Mechanism::name() const {
  switch (kind) {
    case MechanismKind::ProbabilisticSerial: return "ps";
    case MechanismKind::RandomPriority: return "rp";
    case MechanismKind::SerialDictatorship: return "sd";
    case MechanismKind::RandomDictatorial: return "rd";
    case MechanismKind::NaiveMaxWelfare: return "naive";
  }
  throw DomainError("unknown mechanism");
}

Mechanism mechanism_from_string(const std::string& name) {
  if (name == "ps") return Mechanism::ps();
  if (name == "rp") return Mechanism::rp();
  if (name == "sd") return Mechanism::sd({});
  if (name == "rd") return Mechanism::rd();
  if (name == "naive") return Mechanism::naive();
  throw ParseError("unknown mechanism '" + name + "' (ps, rp, sd, rd, naive)");
}

AssignmentMatrix run_ordinal(const Mechanism& mech, const PreferenceProfile& prefs) {
  int n = static_cast<int>(prefs.size());
  switch (mech.kind) {
    case MechanismKind::ProbabilisticSerial:
      return probabilistic_serial(prefs).p;
    case MechanismKind::RandomPriority:
      return random_priority_exact(prefs, mech.rp_opt);
    case MechanismKind::SerialDictatorship: {
      std::vector<int> order = mech.dictator_order;
      if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
      }
      return matrix_of(serial_dictatorship(prefs, order), n);
    }
    case MechanismKind::RandomDictatorial:
      return random_dictatorial(prefs);
    case MechanismKind::NaiveMaxWelfare:
      throw DomainError("naive max welfare takes cardinal reports, not orders");
  }
  throw DomainError("unknown mechanism");
}

}  // namespace matchpoa
