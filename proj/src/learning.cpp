#include "matchpoa/learning.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "matchpoa/errors.hpp"
#include "matchpoa/rng.hpp"

namespace matchpoa {

std::string to_string(Learner l) {
  switch (l) {
    case Learner::RegretMatching:
      return "regret-matching";
    case Learner::MultiplicativeWeights:
      return "multiplicative-weights";
  }
  throw DomainError("unknown learner");
}

Learner learner_from_string(const std::string& s) {
  if (s == "regret-matching" || s == "rm") return Learner::RegretMatching;
  if (s == "multiplicative-weights" || s == "mw") return Learner::MultiplicativeWeights;
  throw ParseError("unknown learner '" + s + "' (regret-matching, multiplicative-weights)");
}

std::uint64_t encode_profile_key(const std::vector<std::uint32_t>& digits,
                                 std::uint64_t base) {
  std::uint64_t key = 0;
  for (std::uint32_t d : digits) key = key * base + d;
  return key;
}

std::vector<std::uint32_t> decode_profile_key(std::uint64_t key, int n, std::uint64_t base) {
  std::vector<std::uint32_t> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    digits[i] = static_cast<std::uint32_t>(key % base);
    key /= base;
  }
  return digits;
}

namespace {

struct ProfilePayoffs {
  std::vector<Rat> util;  // true expected utility per agent at this profile
  Rat welfare;
};

// Lazily evaluated utilities keyed by joint profile; play concentrates as the
// learners converge, so most rounds hit the cache.
class PayoffCache {
 public:
  PayoffCache(const Mechanism& mech, const ValuationProfile& truth,
              const std::vector<PreferenceOrder>& orders)
      : mech_(mech), truth_(truth), orders_(orders), work_(truth.n) {}

  const ProfilePayoffs& at(std::uint64_t key, const std::vector<std::uint32_t>& digits) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const int n = truth_.n;
    for (int i = 0; i < n; ++i) work_[i] = orders_[digits[i]];
    AssignmentMatrix m = run_ordinal(mech_, work_);
    ProfilePayoffs p;
    p.util.resize(n);
    p.welfare = Rat(0);
    for (int i = 0; i < n; ++i) {
      p.util[i] = row_utility(truth_.values[i], m.p[i]);
      p.welfare += p.util[i];
    }
    return cache_.emplace(key, std::move(p)).first->second;
  }

 private:
  const Mechanism& mech_;
  const ValuationProfile& truth_;
  const std::vector<PreferenceOrder>& orders_;
  PreferenceProfile work_;
  std::unordered_map<std::uint64_t, ProfilePayoffs> cache_;
};

int sample_index(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const int k = static_cast<int>(weights.size());
  if (!(total > 0.0)) return static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  double x = rng.unit() * total;
  for (int s = 0; s < k; ++s) {
    x -= weights[s];
    if (x < 0.0) return s;
  }
  return k - 1;
}

}  // namespace

LearnedDistribution no_regret_dynamics(const Mechanism& mech, const ValuationProfile& truth,
                                       const LearnOptions& opt) {
  if (auto res = validate_profile(truth); !res.ok) {
    throw ShapeError("truth profile invalid: " + res.message);
  }
  if (!mech.ordinal()) {
    throw DomainError("no-regret dynamics runs over ordinal strategy sets");
  }
  const int n = truth.n;
  if (n > opt.strategy_cap) {
    throw CapacityError("strategy set is n! orders per agent; n = " + std::to_string(n) +
                        " exceeds the cap of " + std::to_string(opt.strategy_cap));
  }
  if (opt.rounds == 0) throw DomainError("rounds must be positive");

  const std::vector<PreferenceOrder> orders = all_strict_orders(n);
  const int K = static_cast<int>(orders.size());
  const std::uint64_t T = opt.rounds;

  LearnedDistribution out;
  out.n = n;
  out.learner = opt.learner;
  out.rounds = T;
  out.seed = opt.seed;
  out.strategies = orders;
  out.play_counts.assign(n, std::vector<std::uint64_t>(K, 0));
  out.weights.assign(n, std::vector<double>(K, 1.0 / K));

  PayoffCache cache(mech, truth, orders);
  Rng rng(opt.seed);

  // exact cumulative payoffs: one per counterfactual strategy plus realized
  std::vector<std::vector<Rat>> cum_cf(n, std::vector<Rat>(K, Rat(0)));
  std::vector<Rat> cum_real(n, Rat(0));
  Rat cum_welfare(0);
  // learner state in doubles
  std::vector<std::vector<double>> regret_d(n, std::vector<double>(K, 0.0));
  std::vector<std::vector<double>> mw(n, std::vector<double>(K, 1.0 / K));

  std::vector<std::uint32_t> played(n, 0);
  std::vector<std::uint32_t> digits(n, 0);
  std::vector<double> dist(K, 0.0);

  const int snaps = std::max(opt.checkpoints, 1);
  std::uint64_t next_snap = std::max<std::uint64_t>(T / snaps, 1);

  for (std::uint64_t t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      if (opt.learner == Learner::RegretMatching) {
        for (int s = 0; s < K; ++s) dist[s] = std::max(regret_d[i][s], 0.0);
      } else {
        dist = mw[i];
      }
      played[i] = static_cast<std::uint32_t>(sample_index(dist, rng));
      ++out.play_counts[i][played[i]];
    }
    const std::uint64_t real_key = encode_profile_key(played, static_cast<std::uint64_t>(K));
    ++out.joint_counts[real_key];

    const ProfilePayoffs& real = cache.at(real_key, played);
    cum_welfare += real.welfare;

    for (int i = 0; i < n; ++i) {
      digits = played;
      const double u_real = real.util[i].approx();
      cum_real[i] += real.util[i];
      for (int s = 0; s < K; ++s) {
        digits[i] = static_cast<std::uint32_t>(s);
        const Rat& u =
            s == static_cast<int>(played[i])
                ? real.util[i]
                : cache.at(encode_profile_key(digits, static_cast<std::uint64_t>(K)), digits)
                      .util[i];
        cum_cf[i][s] += u;
        const double ud = u.approx();
        regret_d[i][s] += ud - u_real;
        if (opt.learner == Learner::MultiplicativeWeights) {
          mw[i][s] *= std::exp(opt.eta * ud);
        }
      }
      if (opt.learner == Learner::MultiplicativeWeights) {
        double total = 0.0;
        for (double w : mw[i]) total += w;
        if (total > 0.0) {
          for (double& w : mw[i]) w /= total;
        } else {
          std::fill(mw[i].begin(), mw[i].end(), 1.0 / K);
        }
      }
    }

    if (t == next_snap || t == T) {
      double worst = 0.0;
      bool first = true;
      for (int i = 0; i < n; ++i) {
        double best = *std::max_element(regret_d[i].begin(), regret_d[i].end());
        double avg = best / static_cast<double>(t);
        if (first || avg > worst) worst = avg, first = false;
      }
      if (out.checkpoints.empty() || out.checkpoints.back().first != t) {
        out.checkpoints.emplace_back(t, worst);
      }
      next_snap = std::min<std::uint64_t>(T, next_snap + std::max<std::uint64_t>(T / snaps, 1));
    }
  }

  out.avg_regret_exact.resize(n);
  out.avg_regret.resize(n);
  const Rat rounds_rat(static_cast<long long>(T));
  for (int i = 0; i < n; ++i) {
    Rat best = cum_cf[i][0];
    for (int s = 1; s < K; ++s) best = max(best, cum_cf[i][s]);
    out.avg_regret_exact[i] = (best - cum_real[i]) / rounds_rat;
    out.avg_regret[i] = out.avg_regret_exact[i].approx();
  }
  out.avg_welfare_exact = cum_welfare / rounds_rat;
  out.avg_welfare = out.avg_welfare_exact.approx();

  for (int i = 0; i < n; ++i) {
    if (opt.learner == Learner::RegretMatching) {
      double total = 0.0;
      for (int s = 0; s < K; ++s) total += std::max(regret_d[i][s], 0.0);
      if (total > 0.0) {
        for (int s = 0; s < K; ++s) out.weights[i][s] = std::max(regret_d[i][s], 0.0) / total;
      }  // else keep uniform
    } else {
      out.weights[i] = mw[i];
    }
  }
  return out;
}

}  // namespace matchpoa
