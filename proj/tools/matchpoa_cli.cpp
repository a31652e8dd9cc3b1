#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "matchpoa/constructions.hpp"
#include "matchpoa/core.hpp"
#include "matchpoa/equilibrium.hpp"
#include "matchpoa/errors.hpp"
#include "matchpoa/io.hpp"
#include "matchpoa/learning.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/properties.hpp"
#include "matchpoa/rational.hpp"
#include "matchpoa/welfare.hpp"

namespace {

using namespace matchpoa;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kInputError = 2;
constexpr int kInconclusive = 3;

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

ValuationProfile load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

std::vector<int> parse_perm(const std::string& text, int n, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok) - 1);
    } catch (const std::exception&) {
      throw ParseError(what + ": bad entry '" + tok + "'");
    }
  }
  if (!is_permutation_of_items(out, n)) {
    throw ParseError(what + " must be a permutation of 1.." + std::to_string(n));
  }
  return out;
}

std::string perm_str(const std::vector<int>& r) {
  std::string s = "(";
  for (size_t i = 0; i < r.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(r[i] + 1);
  }
  return s + ")";
}

std::string profile_str(const PreferenceProfile& prof) {
  std::string s;
  for (size_t i = 0; i < prof.size(); ++i) {
    if (i) s += " ";
    s += perm_str(prof[i].ranking);
  }
  return s;
}

DeviationSpace space_from_string(const std::string& text) {
  if (text == "all") return DeviationSpace::all();
  if (text.rfind("top:", 0) == 0) {
    try {
      return DeviationSpace::top(std::stoi(text.substr(4)));
    } catch (const std::exception&) {
      throw ParseError("bad deviation space '" + text + "'");
    }
  }
  throw ParseError("unknown deviation space '" + text + "' (all, top:M)");
}

struct MechFlags {
  std::string name = "ps";
  std::string sd_order;  // 1-based comma list
  int rp_cap = 8;

  Mechanism build(int n) const {
    Mechanism m = mechanism_from_string(name);
    m.rp_opt.exact_cap = rp_cap;
    if (m.kind == MechanismKind::SerialDictatorship && !sd_order.empty()) {
      m.dictator_order = parse_perm(sd_order, n, "--order");
    }
    return m;
  }
};

void add_mech_flags(CLI::App* cmd, MechFlags& mf) {
  cmd->add_option("--mechanism", mf.name, "ps, rp, sd, rd, or naive")->required();
  cmd->add_option("--order", mf.sd_order, "sd picking order, 1-based agents");
  cmd->add_option("--cap", mf.rp_cap, "largest n for exact rp averaging");
}

std::string suite_csv_header() { return "check,instances,violations,seed\n"; }

std::string suite_csv_row(const PropertyReport& r) {
  return r.property + "," + std::to_string(r.instances) + "," +
         std::to_string(r.violations.size()) + "," + std::to_string(r.seed) + "\n";
}

std::string suite_witnesses(const PropertyReport& r) {
  std::string s;
  for (const auto& v : r.violations) {
    s += "# violation [" + r.property + "] instance " + std::to_string(v.instance) + ": " +
         v.witness + "\n";
  }
  return s;
}

std::string eq_csv_header() { return "profile_id,verified,max_gain,welfare,opt,ratio\n"; }

std::string eq_csv_row(std::uint64_t id, const EquilibriumReport& r, const Rat& opt) {
  std::string ratio = r.welfare > Rat(0) ? (opt / r.welfare).str() : "";
  return std::to_string(id) + "," + (r.verified ? "true" : "false") + "," +
         r.max_gain.str() + "," + r.welfare.str() + "," + opt.str() + "," + ratio + "\n";
}

// ---- run ----------------------------------------------------------------

struct RunArgs {
  MechFlags mech;
  std::string instance, strategies, out;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

int cmd_run(const RunArgs& a) {
  ValuationProfile truth = load_instance(a.instance);
  Mechanism mech = a.mech.build(truth.n);

  std::string head = "# matchpoa run --mechanism " + mech.name() + " --instance " +
                     a.instance;
  std::string body;

  if (mech.kind == MechanismKind::NaiveMaxWelfare) {
    Matching mu = naive_max_welfare(truth);
    body = assignment_csv(matrix_of(mu, truth.n));
  } else {
    PreferenceProfile prefs = a.strategies.empty()
                                  ? induced_profile(truth)
                                  : parse_strategies(read_file(a.strategies), truth.n);
    if (!a.strategies.empty()) head += " --strategies " + a.strategies;
    if (mech.kind == MechanismKind::RandomPriority && a.trials > 0) {
      head += " --trials " + std::to_string(a.trials) + " --seed " + std::to_string(a.seed);
      body = assignment_csv(random_priority_sampled(prefs, a.seed, a.trials));
    } else if (mech.kind == MechanismKind::ProbabilisticSerial) {
      PsResult res = probabilistic_serial(prefs);
      body = assignment_csv(res.p);
      body += "times";
      for (const Rat& t : res.times.t) body += "," + t.str();
      body += "\n";
    } else {
      body = assignment_csv(run_ordinal(mech, prefs));
    }
  }
  emit(a.out, head + "\n" + body);
  return kOk;
}

// ---- opt ----------------------------------------------------------------

int cmd_opt(const std::string& instance, const std::string& out) {
  ValuationProfile truth = load_instance(instance);
  OptResult res = optimal_matching(truth);
  std::string s = "# matchpoa opt --instance " + instance + "\nagent,item,value\n";
  for (int i = 0; i < truth.n; ++i) {
    s += std::to_string(i + 1) + "," + std::to_string(res.mu.item_of[i] + 1) + "," +
         truth.values[i][res.mu.item_of[i]].str() + "\n";
  }
  s += "welfare," + res.welfare.str() + ",\n";
  emit(out, s);
  return kOk;
}

// ---- nash ---------------------------------------------------------------

struct NashArgs {
  MechFlags mech;
  std::string instance, strategies, reports, out;
  std::string epsilon = "0";
  std::string space = "all";
  std::uint64_t eval_budget = 1'000'000;
  std::uint64_t profile_budget = 331776;
  int grid_d = 8;
  std::uint64_t seed = 0;
  int max_passes = 100;
  std::string order = "round-robin";
};

int cmd_nash_verify(const NashArgs& a) {
  ValuationProfile truth = load_instance(a.instance);
  Mechanism mech = a.mech.build(truth.n);
  const Rat eps = Rat::parse(a.epsilon);
  const Rat opt = optimal_matching(truth).welfare;

  if (!mech.ordinal()) {
    std::vector<std::vector<Rat>> reports =
        a.reports.empty() ? truth.values : load_instance(a.reports).values;
    GridSpace grid;
    grid.D = a.grid_d;
    CardinalEquilibriumReport rep = verify_cardinal_nash(truth, reports, grid, eps, {});
    std::string s = "# matchpoa nash verify --mechanism naive --instance " + a.instance +
                    (a.reports.empty() ? "" : " --reports " + a.reports) + " --epsilon " +
                    eps.str() + " --grid-d " + std::to_string(a.grid_d) + "\n";
    s += "# certified relative to " + rep.deviation_space + "\n";
    s += eq_csv_header();
    std::string ratio = rep.welfare > Rat(0) ? (opt / rep.welfare).str() : "";
    s += std::string("1,") + (rep.verified ? "true" : "false") + "," + rep.max_gain.str() +
         "," + rep.welfare.str() + "," + opt.str() + "," + ratio + "\n";
    if (rep.witness) {
      s += "# witness agent=" + std::to_string(rep.witness->agent + 1) + " gain=" +
           rep.witness->gain.str() + "\n";
    }
    emit(a.out, s);
    return rep.verified ? kOk : kViolation;
  }

  PreferenceProfile strategies = parse_strategies(read_file(a.strategies), truth.n);
  DeviationSpace space = space_from_string(a.space);
  EqOptions opt_eq;
  opt_eq.eval_budget = a.eval_budget;
  EquilibriumReport rep = verify_pure_nash(mech, truth, strategies, space, eps, opt_eq);
  std::string s = "# matchpoa nash verify --mechanism " + mech.name() + " --instance " +
                  a.instance + " --strategies " + a.strategies + " --epsilon " + eps.str() +
                  " --space " + a.space + "\n";
  s += "# profile " + profile_str(strategies) + "\n";
  s += eq_csv_header() + eq_csv_row(1, rep, opt);
  if (rep.witness) {
    s += "# witness agent=" + std::to_string(rep.witness->agent + 1) + " strategy=" +
         perm_str(rep.witness->strategy.ranking) + " gain=" + rep.witness->gain.str() + "\n";
  }
  emit(a.out, s);
  return rep.verified ? kOk : kViolation;
}

int cmd_nash_enumerate(const NashArgs& a) {
  ValuationProfile truth = load_instance(a.instance);
  Mechanism mech = a.mech.build(truth.n);
  const Rat eps = Rat::parse(a.epsilon);
  EnumerateOptions opt_en;
  opt_en.profile_budget = a.profile_budget;
  std::vector<EquilibriumReport> found = enumerate_pure_nash(mech, truth, eps, opt_en);
  const Rat opt = optimal_matching(truth).welfare;

  std::string s = "# matchpoa nash enumerate --mechanism " + mech.name() + " --instance " +
                  a.instance + " --epsilon " + eps.str() + "\n";
  s += eq_csv_header();
  std::uint64_t id = 0;
  std::vector<Rat> welfares;
  for (const auto& r : found) {
    s += eq_csv_row(++id, r, opt);
    welfares.push_back(r.welfare);
  }
  std::string tail;
  for (std::uint64_t i = 0; i < found.size(); ++i) {
    tail += "# profile " + std::to_string(i + 1) + ": " + profile_str(found[i].profile) + "\n";
  }
  if (!found.empty()) {
    AnarchyRatios ratios = anarchy_ratios(welfares, opt);
    tail += "# poa = " + ratios.poa.str() + "\n# pos = " + ratios.pos.str() + "\n";
  } else {
    tail += "# no exact pure equilibrium\n";
  }
  emit(a.out, s + tail);
  return kOk;
}

int cmd_nash_brd(const NashArgs& a) {
  ValuationProfile truth = load_instance(a.instance);
  Mechanism mech = a.mech.build(truth.n);
  BrdOptions opt_brd;
  opt_brd.max_passes = a.max_passes;
  opt_brd.seed = a.seed;
  opt_brd.epsilon = Rat::parse(a.epsilon);
  opt_brd.eq.eval_budget = a.eval_budget;
  if (a.order == "random") {
    opt_brd.order = AgentOrder::SeededRandom;
  } else if (a.order != "round-robin") {
    throw ParseError("unknown agent order '" + a.order + "' (round-robin, random)");
  }
  PreferenceProfile init = a.strategies.empty()
                               ? induced_profile(truth)
                               : parse_strategies(read_file(a.strategies), truth.n);
  BrdResult res = best_response_dynamics(mech, truth, init, opt_brd);
  const Rat opt = optimal_matching(truth).welfare;

  std::string s = "# matchpoa nash brd --mechanism " + mech.name() + " --instance " +
                  a.instance +
                  (a.strategies.empty() ? " --init truthful" : " --strategies " + a.strategies) +
                  " --epsilon " + opt_brd.epsilon.str() + " --max-passes " +
                  std::to_string(a.max_passes) + " --agent-order " + a.order + " --seed " +
                  std::to_string(a.seed) + "\n";
  s += "# final profile " + profile_str(res.profile) + "\n";
  s += "# converged = " + std::string(res.converged ? "true" : "false") + ", passes = " +
       std::to_string(res.passes) + ", evaluations = " + std::to_string(res.evaluations) +
       "\n";
  s += eq_csv_header();
  if (res.report) s += eq_csv_row(1, *res.report, opt);
  emit(a.out, s);
  return res.converged && res.report && res.report->verified ? kOk : kInconclusive;
}

// ---- learn --------------------------------------------------------------

struct LearnArgs {
  MechFlags mech;
  std::string instance, out;
  std::uint64_t rounds = 1000;
  std::uint64_t seed = 0;
  std::string learner = "regret-matching";
  double eta = 0.5;
  int cap = 5;
  int checkpoints = 10;
};

int cmd_learn(const LearnArgs& a) {
  ValuationProfile truth = load_instance(a.instance);
  Mechanism mech = a.mech.build(truth.n);
  LearnOptions opt;
  opt.rounds = a.rounds;
  opt.seed = a.seed;
  opt.learner = learner_from_string(a.learner);
  opt.eta = a.eta;
  opt.strategy_cap = a.cap;
  opt.checkpoints = a.checkpoints;
  LearnedDistribution d = no_regret_dynamics(mech, truth, opt);

  std::string s = "# matchpoa learn --mechanism " + mech.name() + " --instance " +
                  a.instance + " --rounds " + std::to_string(a.rounds) + " --seed " +
                  std::to_string(a.seed) + " --learner " + to_string(opt.learner) +
                  (opt.learner == Learner::MultiplicativeWeights ? " --eta " + fmt(a.eta)
                                                                 : "") +
                  "\n";
  s += "agent,avg_regret,avg_regret_float\n";
  for (int i = 0; i < d.n; ++i) {
    s += std::to_string(i + 1) + "," + d.avg_regret_exact[i].str() + "," +
         fmt(d.avg_regret[i]) + "\n";
  }
  s += "welfare," + d.avg_welfare_exact.str() + "," + fmt(d.avg_welfare) + "\n";
  s += "round,max_avg_regret\n";
  for (const auto& [round, regret] : d.checkpoints) {
    s += std::to_string(round) + "," + fmt(regret) + "\n";
  }
  emit(a.out, s);
  return kOk;
}

// ---- check --------------------------------------------------------------

struct CheckArgs {
  MechFlags mech;
  std::string out;
  std::uint64_t count = 20;
  std::uint64_t seed = 0;
  int n = 3;
  int n_min = 3;
  int n_max = 5;
  int grid = 1000;
  bool exhaustive = false;
  int agent = 1;
  std::string strategy, true_order;
  int cap = 4;
};

int cmd_check_ps_suite(const CheckArgs& a) {
  RandomInstances src;
  src.count = a.count;
  src.seed = a.seed;
  src.n_min = a.n_min;
  src.n_max = a.n_max;
  src.grid = a.grid;
  std::vector<PropertyReport> suite = ps_bounds_suite(src);
  std::string s = "# matchpoa check ps-suite --count " + std::to_string(a.count) +
                  " --seed " + std::to_string(a.seed) + " --nmin " + std::to_string(a.n_min) +
                  " --nmax " + std::to_string(a.n_max) + "\n";
  s += suite_csv_header();
  bool all_ok = true;
  for (const auto& r : suite) {
    s += suite_csv_row(r);
    all_ok = all_ok && r.passed();
  }
  for (const auto& r : suite) s += suite_witnesses(r);
  emit(a.out, s);
  return all_ok ? kOk : kViolation;
}

int cmd_check_envy(const CheckArgs& a) {
  Mechanism mech = a.mech.build(a.n);
  ProfileSource src = a.exhaustive ? ProfileSource::exhaustive(a.n)
                                   : ProfileSource::random(a.n, a.count, a.seed);
  PropertyReport r = check_envy_free(mech, src);
  std::string s = "# matchpoa check envy --mechanism " + mech.name() + " --n " +
                  std::to_string(a.n) +
                  (a.exhaustive ? " --exhaustive"
                                : " --count " + std::to_string(a.count) + " --seed " +
                                      std::to_string(a.seed)) +
                  "\n";
  s += suite_csv_header() + suite_csv_row(r) + suite_witnesses(r);
  emit(a.out, s);
  return r.passed() ? kOk : kViolation;
}

int cmd_check_safe(const CheckArgs& a) {
  const int n = a.n;
  Mechanism mech = a.mech.build(n);
  if (a.agent < 1 || a.agent > n) throw ParseError("--agent must be in 1..n");
  PreferenceOrder strat{parse_perm(a.strategy, n, "--strategy")};
  PreferenceOrder truth{a.true_order.empty() ? strat.ranking
                                             : parse_perm(a.true_order, n, "--true-order")};
  OpponentSpace space = a.exhaustive ? OpponentSpace::exhaustive(a.cap)
                                     : OpponentSpace::sampled(a.count, a.seed);
  PropertyReport r = check_safe_strategy(mech, a.agent - 1, strat, truth, space);
  auto flat = [](const std::vector<int>& r) {
    std::string s;
    for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i] + 1);
    return s;
  };
  std::string s = "# matchpoa check safe --mechanism " + mech.name() + " --n " +
                  std::to_string(n) + " --agent " + std::to_string(a.agent) + " --strategy " +
                  flat(strat.ranking) + " --true-order " + flat(truth.ranking) +
                  (a.exhaustive ? " --exhaustive"
                                : " --count " + std::to_string(a.count) + " --seed " +
                                      std::to_string(a.seed)) +
                  "\n";
  s += suite_csv_header() + suite_csv_row(r) + suite_witnesses(r);
  emit(a.out, s);
  return r.passed() ? kOk : kViolation;
}

// ---- construct / audit / sweep -------------------------------------------

struct BuildArgs {
  MechFlags mech;
  std::string family;
  int n = 0;
  int k = 0;
  std::string alpha = "0";
  std::string delta = "0";
  std::string variant = "base";
  std::string strategy = "truthful";
  std::uint64_t seed = 0;
  int k_min = 2;
  int k_max = 3;
  int n_min = 0;
  int n_max = 0;
  std::string out;
};

ConstructionParams params_from(const BuildArgs& a) {
  ConstructionParams p;
  p.family = family_from_string(a.family);
  p.n = a.n;
  p.k = a.k;
  p.alpha = Rat::parse(a.alpha);
  p.delta = Rat::parse(a.delta);
  return p;
}

int cmd_construct(const BuildArgs& a) {
  ConstructionParams p = params_from(a).resolved();
  ValuationProfile u;
  switch (p.family) {
    case Family::Thm4General:
      u = gen_thm4(p.k, p.alpha);
      break;
    case Family::Thm5Deterministic: {
      auto [base, swap] = gen_thm5(p.n);
      if (a.variant == "swap") {
        u = swap;
      } else if (a.variant == "base") {
        u = base;
      } else {
        throw ParseError("unknown variant '" + a.variant + "' (base, swap)");
      }
      break;
    }
    case Family::Thm6Pos:
      u = gen_thm6_pos(p.n, p.k);
      break;
    case Family::Thm10UnitRange:
      u = gen_thm10_unit_range(p.k, p.delta);
      break;
  }
  emit(a.out, serialize_instance(u));
  return kOk;
}

std::string audit_csv(const ConstructionReport& r) {
  auto opt_str = [](const std::optional<Rat>& x) { return x ? x->str() : std::string(); };
  std::string s =
      "family,mechanism,n,k,conclusive,welfare,opt,ratio,predicted_bound,poa,pos\n";
  s += to_string(r.family) + "," + r.mechanism + "," + std::to_string(r.n) + "," +
       std::to_string(r.k) + "," + (r.conclusive ? "true" : "false") + "," +
       r.welfare.str() + "," + r.opt.str() + "," + r.ratio.str() + "," +
       (r.has_prediction ? r.predicted_bound.str() : "") + "," + opt_str(r.poa) + "," +
       opt_str(r.pos) + "\n";
  for (const auto& note : r.notes) s += "# note: " + note + "\n";
  return s;
}

int audit_exit(const ConstructionReport& r) {
  if (!r.conclusive) return kInconclusive;
  for (const auto& note : r.notes) {
    if (note.rfind("violation:", 0) == 0) return kViolation;
  }
  if (r.has_prediction && r.ratio < r.predicted_bound) return kViolation;
  return kOk;
}

StrategyMode mode_from(const BuildArgs& a, int n) {
  if (a.strategy == "truthful") return StrategyMode::truthful();
  if (a.strategy == "brd") return StrategyMode::brd(a.seed);
  return StrategyMode::explicit_profile(parse_strategies(read_file(a.strategy), n));
}

int cmd_audit(const BuildArgs& a) {
  ConstructionParams p = params_from(a).resolved();
  Mechanism mech = a.mech.build(p.n);
  ConstructionReport r = verify_construction(mech, p, mode_from(a, p.n));
  std::string s = "# matchpoa audit " + to_string(r.family) + " --mechanism " + mech.name() +
                  " --n " + std::to_string(r.n) + " --k " + std::to_string(r.k) +
                  " --strategy " + a.strategy + " --seed " + std::to_string(a.seed) + "\n";
  s += audit_csv(r);
  emit(a.out, s);
  return audit_exit(r);
}

int cmd_sweep(const BuildArgs& a) {
  Family family = family_from_string(a.family);
  std::string s = "# matchpoa sweep " + to_string(family) + " --mechanism " + a.mech.name;
  std::vector<ConstructionParams> runs;
  if (family == Family::Thm5Deterministic) {
    const int lo = a.n_min > 0 ? a.n_min : 4;
    const int hi = a.n_max > 0 ? a.n_max : 8;
    s += " --nmin " + std::to_string(lo) + " --nmax " + std::to_string(hi);
    for (int n = lo; n <= hi; ++n) {
      ConstructionParams p;
      p.family = family;
      p.n = n;
      runs.push_back(p);
    }
  } else {
    s += " --kmin " + std::to_string(a.k_min) + " --kmax " + std::to_string(a.k_max);
    for (int k = a.k_min; k <= a.k_max; ++k) {
      ConstructionParams p;
      p.family = family;
      p.k = k;
      if (family == Family::Thm6Pos) {
        p.n = k * k;  // square instances, matching the other families
      }
      runs.push_back(p);
    }
  }
  s += " --strategy " + a.strategy + " --seed " + std::to_string(a.seed) + "\n";
  s += "k,n,conclusive,welfare,opt,ratio,predicted_bound\n";

  int exit_code = kOk;
  std::string notes;
  for (const auto& p : runs) {
    ConstructionParams rp = p.resolved();
    Mechanism mech = a.mech.build(rp.n);
    ConstructionReport r = verify_construction(mech, rp, mode_from(a, rp.n));
    s += std::to_string(r.k) + "," + std::to_string(r.n) + "," +
         (r.conclusive ? "true" : "false") + "," + r.welfare.str() + "," + r.opt.str() +
         "," + r.ratio.str() + "," + (r.has_prediction ? r.predicted_bound.str() : "") +
         "\n";
    for (const auto& note : r.notes) {
      notes += "# note k=" + std::to_string(r.k) + ": " + note + "\n";
    }
    exit_code = std::max(exit_code, audit_exit(r));
  }
  emit(a.out, s + notes);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matchpoa: exact one-sided matching mechanisms and their equilibria"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run a mechanism on an instance");
  add_mech_flags(run, run_args.mech);
  run->add_option("--instance", run_args.instance)->required();
  run->add_option("--strategies", run_args.strategies, "strategy file (default: truthful)");
  run->add_option("--trials", run_args.trials, "sample rp instead of exact averaging");
  run->add_option("--seed", run_args.seed);
  run->add_option("-o,--out", run_args.out);

  std::string opt_instance, opt_out;
  auto* opt = app.add_subcommand("opt", "optimal matching and welfare");
  opt->add_option("--instance", opt_instance)->required();
  opt->add_option("-o,--out", opt_out);

  NashArgs nash_args;
  auto* nash = app.add_subcommand("nash", "equilibrium tools");
  nash->require_subcommand(1);
  auto* verify = nash->add_subcommand("verify", "check a profile for equilibrium");
  auto* enumerate = nash->add_subcommand("enumerate", "list all pure equilibria");
  auto* brd = nash->add_subcommand("brd", "best-response dynamics");
  for (CLI::App* c : {verify, enumerate, brd}) {
    add_mech_flags(c, nash_args.mech);
    c->add_option("--instance", nash_args.instance)->required();
    c->add_option("--epsilon", nash_args.epsilon, "allowed gain, rational");
    c->add_option("-o,--out", nash_args.out);
  }
  verify->add_option("--strategies", nash_args.strategies);
  verify->add_option("--reports", nash_args.reports, "cardinal reports instance (naive)");
  verify->add_option("--space", nash_args.space, "all or top:M");
  verify->add_option("--budget", nash_args.eval_budget);
  verify->add_option("--grid-d", nash_args.grid_d, "cardinal grid denominator");
  enumerate->add_option("--budget", nash_args.profile_budget);
  brd->add_option("--strategies", nash_args.strategies, "initial profile (default truthful)");
  brd->add_option("--seed", nash_args.seed);
  brd->add_option("--max-passes", nash_args.max_passes);
  brd->add_option("--agent-order", nash_args.order, "round-robin or random");

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "no-regret dynamics");
  add_mech_flags(learn, learn_args.mech);
  learn->add_option("--instance", learn_args.instance)->required();
  learn->add_option("--rounds", learn_args.rounds);
  learn->add_option("--seed", learn_args.seed);
  learn->add_option("--learner", learn_args.learner, "regret-matching or multiplicative-weights");
  learn->add_option("--eta", learn_args.eta);
  learn->add_option("--strategy-cap", learn_args.cap);
  learn->add_option("--checkpoints", learn_args.checkpoints);
  learn->add_option("-o,--out", learn_args.out);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "property suites");
  check->require_subcommand(1);
  auto* suite = check->add_subcommand("ps-suite", "exact inequality suite");
  suite->add_option("--count", check_args.count);
  suite->add_option("--seed", check_args.seed);
  suite->add_option("--nmin", check_args.n_min);
  suite->add_option("--nmax", check_args.n_max);
  suite->add_option("--grid", check_args.grid);
  suite->add_option("-o,--out", check_args.out);
  auto* envy = check->add_subcommand("envy", "sd envy-freeness");
  auto* safe = check->add_subcommand("safe", "safe-strategy check");
  for (CLI::App* c : {envy, safe}) {
    add_mech_flags(c, check_args.mech);
    c->add_option("--n", check_args.n)->required();
    c->add_flag("--exhaustive", check_args.exhaustive);
    c->add_option("--count", check_args.count);
    c->add_option("--seed", check_args.seed);
    c->add_option("-o,--out", check_args.out);
  }
  safe->add_option("--agent", check_args.agent, "1-based agent index");
  safe->add_option("--strategy", check_args.strategy, "1-based ranking, e.g. 2,1,3")
      ->required();
  safe->add_option("--true-order", check_args.true_order, "default: the strategy itself");
  safe->add_option("--opponent-cap", check_args.cap);

  BuildArgs build_args;
  auto* construct = app.add_subcommand("construct", "generate a lower-bound instance");
  auto* audit = app.add_subcommand("audit", "run a lower-bound pipeline");
  auto* sweep = app.add_subcommand("sweep", "audit across a parameter range");
  for (CLI::App* c : {construct, audit, sweep}) {
    c->add_option("family", build_args.family, "thm4, thm5, thm6, or thm10")->required();
    c->add_option("--n", build_args.n);
    c->add_option("--k", build_args.k);
    c->add_option("--alpha", build_args.alpha, "thm4 bump, rational");
    c->add_option("--delta", build_args.delta, "thm10 scale, rational");
    c->add_option("-o,--out", build_args.out);
  }
  construct->add_option("--variant", build_args.variant, "base or swap (thm5)");
  for (CLI::App* c : {audit, sweep}) {
    add_mech_flags(c, build_args.mech);
    c->add_option("--strategy", build_args.strategy, "truthful, brd, or a strategy file");
    c->add_option("--seed", build_args.seed);
  }
  sweep->add_option("--kmin", build_args.k_min);
  sweep->add_option("--kmax", build_args.k_max);
  sweep->add_option("--nmin", build_args.n_min);
  sweep->add_option("--nmax", build_args.n_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*opt) return cmd_opt(opt_instance, opt_out);
    if (*verify) return cmd_nash_verify(nash_args);
    if (*enumerate) return cmd_nash_enumerate(nash_args);
    if (*brd) return cmd_nash_brd(nash_args);
    if (*learn) return cmd_learn(learn_args);
    if (*suite) return cmd_check_ps_suite(check_args);
    if (*envy) return cmd_check_envy(check_args);
    if (*safe) return cmd_check_safe(check_args);
    if (*construct) return cmd_construct(build_args);
    if (*audit) return cmd_audit(build_args);
    if (*sweep) return cmd_sweep(build_args);
  } catch (const CapacityError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
