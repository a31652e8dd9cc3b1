#include "matchpoa/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "matchpoa/errors.hpp"
#include "matchpoa/welfare.hpp"

namespace matchpoa {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int exact_sqrt(int n) {
  int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (k < 1 || k * k != n) {
    throw ShapeError("n = " + std::to_string(n) + " must be a perfect square");
  }
  return k;
}

void require_ordinal(const Mechanism& mech, const char* what) {
  if (!mech.ordinal()) {
    throw DomainError(std::string(what) + " audits ordinal mechanisms; got " + mech.name());
  }
}

std::string profile_note(const PreferenceProfile& prof) {
  std::string s;
  for (const auto& o : prof) {
    s += " (";
    for (size_t k = 0; k < o.ranking.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(o.ranking[k] + 1);
    }
    s += ")";
  }
  return s;
}

PreferenceProfile candidate_profile(const Mechanism& mech, const ValuationProfile& u,
                                    const StrategyMode& mode, ConstructionReport& report) {
  switch (mode.kind) {
    case StrategyMode::Kind::TruthfulCandidate:
      return induced_profile(u);
    case StrategyMode::Kind::BrdSearch: {
      BrdOptions opt;
      opt.seed = mode.brd_seed;
      BrdResult brd = best_response_dynamics(mech, u, induced_profile(u), opt);
      report.notes.push_back("best-response search " +
                             std::string(brd.converged ? "converged" : "did not converge") +
                             " after " + std::to_string(brd.passes) + " passes");
      return brd.profile;
    }
    case StrategyMode::Kind::Explicit:
      return mode.profile;
  }
  throw DomainError("unknown strategy mode");
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Thm4General:
      return "thm4-general";
    case Family::Thm5Deterministic:
      return "thm5-deterministic";
    case Family::Thm6Pos:
      return "thm6-pos";
    case Family::Thm10UnitRange:
      return "thm10-unit-range";
  }
  throw DomainError("unknown family");
}

Family family_from_string(const std::string& s) {
  if (s == "thm4" || s == "thm4-general") return Family::Thm4General;
  if (s == "thm5" || s == "thm5-deterministic") return Family::Thm5Deterministic;
  if (s == "thm6" || s == "thm6-pos") return Family::Thm6Pos;
  if (s == "thm10" || s == "thm10-unit-range") return Family::Thm10UnitRange;
  throw ParseError("unknown family '" + s + "' (thm4, thm5, thm6, thm10)");
}

ConstructionParams ConstructionParams::resolved() const {
  ConstructionParams p = *this;
  switch (p.family) {
    case Family::Thm4General: {
      if (p.k == 0 && p.n > 0) p.k = exact_sqrt(p.n);
      if (p.k < 2) throw ShapeError("family thm4 needs k >= 2");
      p.n = p.k * p.k;
      const long long n = p.n;
      if (p.alpha == Rat(0)) p.alpha = Rat(1, ipow(n, 4));
      if (p.alpha <= Rat(0) || p.alpha >= Rat(1, ipow(n, 3))) {
        throw ShapeError("family thm4 needs 0 < alpha < 1/n^3");
      }
      return p;
    }
    case Family::Thm5Deterministic: {
      if (p.n < 3) throw ShapeError("family thm5 needs n >= 3");
      p.k = 0;
      return p;
    }
    case Family::Thm6Pos: {
      if (p.n < 2) throw ShapeError("family thm6 needs n >= 2");
      if (p.k == 0) p.k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(p.n))));
      if (p.k < 1 || p.k >= p.n) throw ShapeError("family thm6 needs 1 <= k < n");
      return p;
    }
    case Family::Thm10UnitRange: {
      if (p.k == 0 && p.n > 0) p.k = exact_sqrt(p.n);
      if (p.k < 2) throw ShapeError("family thm10 needs k >= 2");
      p.n = p.k * p.k;
      if (p.delta == Rat(0)) {
        for (int a = 1; a <= 9; ++a) {
          Rat d(a, 10);
          if (Rat(p.n) * d * d * d * d > Rat(1)) {
            p.delta = d;
            break;
          }
        }
      }
      if (p.delta <= Rat(0) || p.delta >= Rat(1) ||
          Rat(p.n) * p.delta * p.delta * p.delta * p.delta <= Rat(1)) {
        throw ShapeError("family thm10 needs delta in (0,1) with n > 1/delta^4");
      }
      return p;
    }
  }
  throw DomainError("unknown family");
}

ValuationProfile gen_thm4(int k, const Rat& alpha) {
  ConstructionParams p;
  p.family = Family::Thm4General;
  p.k = k;
  p.alpha = alpha;
  p = p.resolved();
  const int n = p.n;
  const Rat hi = Rat(1, n) + p.alpha;
  const Rat lo = Rat(1, n) - p.alpha / Rat(n - 1);
  ValuationProfile u{n, {}, Normalization::UnitSum};
  u.values.assign(n, std::vector<Rat>(n, lo));
  for (int g = 0; g < p.k; ++g) {
    for (int i = g * p.k; i < (g + 1) * p.k; ++i) u.values[i][g] = hi;
  }
  if (auto res = validate_profile(u); !res.ok) throw Error("thm4 generator: " + res.message);
  return u;
}

ValuationProfile derive_thm4_prime(const ValuationProfile& u, const AssignmentMatrix& p) {
  const int n = u.n;
  if (p.n() != n) throw ShapeError("allocation matrix size differs from the profile");
  const int k = exact_sqrt(n);
  ValuationProfile out = u;
  for (int g = 0; g < k; ++g) {
    int arg = g * k;
    for (int i = g * k + 1; i < (g + 1) * k; ++i) {
      if (p.p[i][g] < p.p[arg][g]) arg = i;
    }
    if (p.p[arg][g] * Rat(k) > Rat(1)) {
      throw DomainError("group minimum exceeds 1/k; allocation matrix is not bistochastic");
    }
    std::fill(out.values[arg].begin(), out.values[arg].end(), Rat(0));
    out.values[arg][g] = Rat(1);
  }
  if (auto res = validate_profile(out); !res.ok) throw Error("thm4 swap: " + res.message);
  return out;
}

std::pair<ValuationProfile, ValuationProfile> gen_thm5(int n) {
  ConstructionParams p;
  p.family = Family::Thm5Deterministic;
  p.n = n;
  p = p.resolved();

  const Rat top = Rat(1, n) + Rat(1, ipow(n, 3));
  const Rat base = (Rat(1) - top) / Rat(n - 1);
  const Rat step = Rat(1, ipow(n, 5));
  std::vector<Rat> row(n);
  row[0] = top;
  for (int t = 1; t < n; ++t) row[t] = base + Rat(n - 2 * t, 2) * step;
  if (row[n - 1] <= Rat(0) || row[0] <= row[1]) throw Error("thm5 schedule degenerate");

  ValuationProfile u{n, std::vector<std::vector<Rat>>(n, row), Normalization::UnitSum};

  const Rat big = Rat(1, ipow(n, 4));  // total mass spread off the near-1 item
  const Rat step2 = big / Rat(ipow(n, 3));
  const Rat tail_base = big / Rat(n - 1);
  ValuationProfile up = u;
  for (int i = 1; i < n; ++i) {
    auto& r = up.values[i];
    int t = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i - 1) {
        r[j] = Rat(1) - big;
      } else {
        ++t;
        r[j] = tail_base + Rat(n - 2 * t, 2) * step2;
        if (r[j] <= Rat(0)) throw Error("thm5 swap schedule degenerate");
      }
    }
  }
  for (const auto& prof : {u, up}) {
    if (auto res = validate_profile(prof); !res.ok) throw Error("thm5 generator: " + res.message);
  }
  return {u, up};
}

ValuationProfile gen_thm6_pos(int n, int k) {
  ConstructionParams p;
  p.family = Family::Thm6Pos;
  p.n = n;
  p.k = k;
  p = p.resolved();
  ValuationProfile u{n, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n, Rat(0))),
                     Normalization::UnitSum};
  for (int i = 0; i < p.k; ++i) u.values[i][i] = Rat(1);
  for (int i = p.k; i < n; ++i) {
    for (int j = 0; j < p.k; ++j) u.values[i][j] = Rat(1, p.k);
  }
  if (auto res = validate_profile(u); !res.ok) throw Error("thm6 generator: " + res.message);
  return u;
}

ValuationProfile gen_thm10_unit_range(int k, const Rat& delta) {
  ConstructionParams p;
  p.family = Family::Thm10UnitRange;
  p.k = k;
  p.delta = delta;
  p = p.resolved();
  const int n = p.n;
  const Rat d2 = p.delta * p.delta;
  const Rat d3 = d2 * p.delta;
  ValuationProfile u{n, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n, Rat(0))),
                     Normalization::UnitRange};
  for (int i = 0; i < n; ++i) {
    u.values[i][0] = Rat(1);
    for (int j = 1; j <= p.k; ++j) u.values[i][j] = i < p.k ? d2 : d3;
  }
  if (auto res = validate_profile(u); !res.ok) throw Error("thm10 generator: " + res.message);
  return u;
}

ConstructionReport verify_construction(const Mechanism& mech_in, const ConstructionParams& params,
                                       const StrategyMode& mode) {
  const ConstructionParams p = params.resolved();
  ConstructionReport report;
  report.family = p.family;
  report.mechanism = mech_in.name();
  report.n = p.n;
  report.k = p.k;

  // pipelines are sized by the construction itself, so exact rp averaging
  // follows n up to the 10! desk-scale limit
  Mechanism mech = mech_in;
  if (mech.kind == MechanismKind::RandomPriority && mech.rp_opt.exact_cap < p.n && p.n <= 10) {
    mech.rp_opt.exact_cap = p.n;
  }

  try {
    switch (p.family) {
      case Family::Thm4General: {
        require_ordinal(mech, "family thm4");
        report.u = gen_thm4(p.k, p.alpha);
        PreferenceProfile s = candidate_profile(mech, report.u, mode, report);
        report.eq_u = verify_pure_nash(mech, report.u, s, DeviationSpace::all(), Rat(0), {});
        if (!report.eq_u->verified) {
          report.notes.push_back("candidate profile" + profile_note(s) +
                                 " is not an equilibrium under the base profile");
          report.welfare = report.eq_u->welfare;
          report.opt = optimal_matching(report.u).welfare;
          if (report.welfare > Rat(0)) report.ratio = report.opt / report.welfare;
          return report;
        }
        AssignmentMatrix m = run_ordinal(mech, s);
        report.u_prime = derive_thm4_prime(report.u, m);
        report.eq_u_prime =
            verify_pure_nash(mech, *report.u_prime, s, DeviationSpace::all(), Rat(0), {});
        report.conclusive = report.eq_u_prime->verified;
        if (!report.conclusive) {
          report.notes.push_back("profile" + profile_note(s) +
                                 " stops being an equilibrium after the swap");
        }
        report.welfare = report.eq_u_prime->welfare;
        report.opt = optimal_matching(*report.u_prime).welfare;
        if (report.welfare > Rat(0)) report.ratio = report.opt / report.welfare;
        report.predicted_bound = Rat(p.k, 3);
        report.has_prediction = true;
        return report;
      }

      case Family::Thm5Deterministic: {
        if (mech.kind != MechanismKind::NaiveMaxWelfare) {
          throw DomainError("family thm5 audits the naive max-welfare mechanism");
        }
        auto [u, up] = gen_thm5(p.n);
        report.u = u;
        report.u_prime = up;
        std::vector<std::vector<Rat>> s(p.n, std::vector<Rat>(p.n, Rat(0)));
        for (int i = 0; i < p.n; ++i) s[i][i] = Rat(1);
        GridSpace grid;
        report.notes.push_back("cardinal equilibria certified relative to " +
                               grid.describe(p.n));
        report.ceq_u = verify_cardinal_nash(u, s, grid, Rat(0), {});
        report.ceq_u_prime = verify_cardinal_nash(up, s, grid, Rat(0), {});
        report.conclusive = report.ceq_u->verified && report.ceq_u_prime->verified;
        if (!report.conclusive) {
          report.notes.push_back("indicator reports failed verification");
        }
        report.welfare = report.ceq_u_prime->welfare;
        report.opt = optimal_matching(up).welfare;
        if (report.welfare > Rat(0)) report.ratio = report.opt / report.welfare;
        report.predicted_bound = Rat(static_cast<long long>(p.n) * (p.n - 2), 2);
        report.has_prediction = true;
        return report;
      }

      case Family::Thm6Pos: {
        require_ordinal(mech, "family thm6");
        report.u = gen_thm6_pos(p.n, p.k);
        report.opt = optimal_matching(report.u).welfare;
        if (mode.kind == StrategyMode::Kind::BrdSearch || p.n > 4) {
          BrdOptions bopt;
          bopt.seed = mode.brd_seed;
          BrdResult brd =
              best_response_dynamics(mech, report.u, induced_profile(report.u), bopt);
          report.notes.push_back("equilibria from best-response search (" +
                                 std::string(brd.converged ? "converged" : "no convergence") +
                                 ")");
          if (brd.report && brd.report->verified) report.equilibria.push_back(*brd.report);
        } else if (mode.kind == StrategyMode::Kind::Explicit) {
          report.equilibria.push_back(verify_pure_nash(mech, report.u, mode.profile,
                                                       DeviationSpace::all(), Rat(0), {}));
          if (!report.equilibria.back().verified) report.equilibria.clear();
        } else {
          report.equilibria = enumerate_pure_nash(mech, report.u, Rat(0), {});
          report.notes.push_back("equilibria from full enumeration: " +
                                 std::to_string(report.equilibria.size()));
        }
        if (report.equilibria.empty()) {
          report.notes.push_back("no exact pure equilibrium found");
          return report;
        }
        const Rat eq_cap = Rat(1) + Rat(static_cast<long long>(p.k) * p.k, p.n);
        std::vector<Rat> welfares;
        for (const auto& eq : report.equilibria) {
          welfares.push_back(eq.welfare);
          if (eq.welfare > eq_cap) {
            report.notes.push_back("violation: equilibrium welfare " + eq.welfare.str() +
                                   " above 1 + k^2/n = " + eq_cap.str());
          }
          AssignmentMatrix m = run_ordinal(mech, eq.profile);
          for (int i = p.k; i < p.n; ++i) {
            Rat util = row_utility(report.u.values[i], m.p[i]);
            if (util * Rat(p.n) < Rat(1)) {
              report.notes.push_back("violation: agent " + std::to_string(i + 1) +
                                     " utility " + util.str() + " below 1/n at" +
                                     profile_note(eq.profile));
            }
          }
        }
        AnarchyRatios ratios = anarchy_ratios(welfares, report.opt);
        report.poa = ratios.poa;
        report.pos = ratios.pos;
        report.welfare = *std::min_element(welfares.begin(), welfares.end());
        report.ratio = ratios.poa;
        report.predicted_bound =
            Rat(static_cast<long long>(p.k) * p.n, p.n + static_cast<long long>(p.k) * p.k);
        report.has_prediction = true;
        report.conclusive = true;
        return report;
      }

      case Family::Thm10UnitRange: {
        require_ordinal(mech, "family thm10");
        report.u = gen_thm10_unit_range(p.k, p.delta);
        PreferenceProfile s = candidate_profile(mech, report.u, mode, report);
        report.eq_u = verify_pure_nash(mech, report.u, s, DeviationSpace::all(), p.delta, {});
        report.conclusive = report.eq_u->verified;
        if (!report.conclusive) {
          report.notes.push_back("candidate profile" + profile_note(s) +
                                 " is not a delta-approximate equilibrium");
        }
        report.welfare = report.eq_u->welfare;
        report.opt = optimal_matching(report.u).welfare;
        const Rat d2 = p.delta * p.delta;
        const Rat opt_formula = Rat(p.k) * d2 + Rat(1);
        if (report.opt != opt_formula) {
          report.notes.push_back("violation: optimal welfare " + report.opt.str() +
                                 " differs from k*delta^2 + 1 = " + opt_formula.str());
        }
        const Rat cap = Rat(1) + Rat(3 * p.k) * d2 * p.delta;
        report.notes.push_back("equilibrium welfare " + report.welfare.str() +
                               (report.welfare <= cap ? " within" : " above") +
                               " the accounting cap 1 + 3k*delta^3 = " + cap.str());
        if (report.welfare > Rat(0)) report.ratio = report.opt / report.welfare;
        return report;
      }
    }
    throw DomainError("unknown family");
  } catch (const CapacityError& e) {
    report.conclusive = false;
    report.notes.push_back(std::string("inconclusive: ") + e.what());
    return report;
  }
}

}  // namespace matchpoa
