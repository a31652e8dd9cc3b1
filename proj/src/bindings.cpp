// Python face of the library. Exact rationals cross the boundary as strings
// ("3/4"), so callers can lift them into fractions.Fraction without any loss;
// agents and items are 0-based on both sides.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "matchpoa/constructions.hpp"
#include "matchpoa/core.hpp"
#include "matchpoa/equilibrium.hpp"
#include "matchpoa/errors.hpp"
#include "matchpoa/learning.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/properties.hpp"
#include "matchpoa/welfare.hpp"

namespace py = pybind11;
using namespace matchpoa;

namespace {

Rat rat_in(const py::handle& h) {
  if (py::isinstance<py::int_>(h)) return Rat(h.cast<long long>());
  return Rat::parse(h.cast<std::string>());
}

std::vector<std::vector<std::string>> matrix_out(const AssignmentMatrix& m) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : m.p) {
    std::vector<std::string> out;
    for (const Rat& v : row) out.push_back(v.str());
    rows.push_back(std::move(out));
  }
  return rows;
}

std::vector<std::vector<std::string>> values_out(const ValuationProfile& v) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : v.values) {
    std::vector<std::string> out;
    for (const Rat& x : row) out.push_back(x.str());
    rows.push_back(std::move(out));
  }
  return rows;
}

ValuationProfile values_in(const std::vector<std::vector<py::object>>& rows,
                           const std::string& normalization) {
  ValuationProfile v;
  v.n = static_cast<int>(rows.size());
  v.normalization = normalization_from_string(normalization);
  for (const auto& row : rows) {
    std::vector<Rat> r;
    for (const auto& cell : row) r.push_back(rat_in(cell));
    v.values.push_back(std::move(r));
  }
  ValidationResult check = validate_profile(v);
  if (!check.ok) throw ShapeError(check.message);
  return v;
}

PreferenceProfile prefs_in(const std::vector<std::vector<int>>& rows) {
  int n = static_cast<int>(rows.size());
  PreferenceProfile prefs;
  for (const auto& row : rows) {
    if (!is_permutation_of_items(row, n))
      throw ShapeError("each ranking must be a permutation of 0..n-1");
    prefs.push_back(PreferenceOrder{row});
  }
  return prefs;
}

std::vector<std::vector<int>> prefs_out(const PreferenceProfile& prefs) {
  std::vector<std::vector<int>> rows;
  for (const auto& o : prefs) rows.push_back(o.ranking);
  return rows;
}

Mechanism mech_in(const std::string& name, int exact_cap, const std::vector<int>& order) {
  Mechanism mech = mechanism_from_string(name);
  if (mech.kind == MechanismKind::RandomPriority && exact_cap > 0) mech.rp_opt.exact_cap = exact_cap;
  if (mech.kind == MechanismKind::SerialDictatorship && !order.empty())
    mech.dictator_order = order;
  return mech;
}

py::dict eq_out(const EquilibriumReport& rep) {
  py::dict d;
  d["profile"] = prefs_out(rep.profile);
  d["verified"] = rep.verified;
  d["deviation_space"] = rep.deviation_space;
  d["epsilon"] = rep.epsilon.str();
  d["max_gain"] = rep.max_gain.str();
  d["welfare"] = rep.welfare.str();
  if (rep.witness) {
    py::dict w;
    w["agent"] = rep.witness->agent;
    w["strategy"] = rep.witness->strategy.ranking;
    w["gain"] = rep.witness->gain.str();
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

py::dict property_out(const PropertyReport& rep) {
  py::dict d;
  d["property"] = rep.property;
  d["instances"] = rep.instances;
  d["mode"] = rep.mode;
  d["seed"] = rep.seed;
  d["exhaustive"] = rep.exhaustive;
  d["passed"] = rep.passed();
  py::list vs;
  for (const auto& v : rep.violations) {
    py::dict item;
    item["instance"] = v.instance;
    item["witness"] = v.witness;
    vs.append(item);
  }
  d["violations"] = vs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact one-sided matching mechanisms and equilibrium tooling";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def(
      "ps",
      [](const std::vector<std::vector<int>>& prefs) {
        PsResult res = probabilistic_serial(prefs_in(prefs));
        py::dict d;
        d["p"] = matrix_out(res.p);
        std::vector<std::string> times;
        for (const Rat& t : res.times.t) times.push_back(t.str());
        d["times"] = times;
        return d;
      },
      py::arg("prefs"),
      "Simultaneous eating: assignment probabilities and item exhaustion times.");

  m.def(
      "random_priority",
      [](const std::vector<std::vector<int>>& prefs, int exact_cap) {
        return matrix_out(random_priority_exact(prefs_in(prefs), RpOptions{exact_cap}));
      },
      py::arg("prefs"), py::arg("exact_cap") = 8,
      "Exact average of serial dictatorship over all n! picking orders.");

  m.def(
      "random_priority_sampled",
      [](const std::vector<std::vector<int>>& prefs, std::uint64_t seed, std::uint64_t trials) {
        return matrix_out(random_priority_sampled(prefs_in(prefs), seed, trials));
      },
      py::arg("prefs"), py::arg("seed"), py::arg("trials"),
      "Monte Carlo estimate over uniformly drawn picking orders.");

  m.def(
      "random_dictatorial",
      [](const std::vector<std::vector<int>>& prefs) {
        return matrix_out(random_dictatorial(prefs_in(prefs)));
      },
      py::arg("prefs"),
      "Uniform dictator takes her top item; the rest follow her ranking.");

  m.def(
      "serial_dictatorship",
      [](const std::vector<std::vector<int>>& prefs, const std::vector<int>& order) {
        return serial_dictatorship(prefs_in(prefs), order).item_of;
      },
      py::arg("prefs"), py::arg("order"),
      "Agents pick their best remaining item in the given order.");

  m.def(
      "run",
      [](const std::string& mechanism, const std::vector<std::vector<int>>& prefs, int exact_cap,
         const std::vector<int>& order) {
        return matrix_out(run_ordinal(mech_in(mechanism, exact_cap, order), prefs_in(prefs)));
      },
      py::arg("mechanism"), py::arg("prefs"), py::arg("exact_cap") = 8,
      py::arg("order") = std::vector<int>{},
      "Run an ordinal mechanism ('ps', 'rp', 'sd', 'rd') on reported orders.");

  m.def(
      "naive_max_welfare",
      [](const std::vector<std::vector<py::object>>& reports, const std::string& normalization) {
        return naive_max_welfare(values_in(reports, normalization)).item_of;
      },
      py::arg("reports"), py::arg("normalization") = "unit-sum",
      "Reported-welfare-maximizing matching, ties toward the smallest item vector.");

  m.def(
      "optimal_matching",
      [](const std::vector<std::vector<py::object>>& values, const std::string& normalization) {
        OptResult res = optimal_matching(values_in(values, normalization));
        py::dict d;
        d["matching"] = res.mu.item_of;
        d["welfare"] = res.welfare.str();
        return d;
      },
      py::arg("values"), py::arg("normalization") = "unit-sum",
      "Welfare-maximizing matching under the true valuations.");

  m.def(
      "social_welfare",
      [](const std::vector<std::vector<py::object>>& values,
         const std::vector<std::vector<py::object>>& p, const std::string& normalization) {
        ValuationProfile truth = values_in(values, normalization);
        AssignmentMatrix m2;
        for (const auto& row : p) {
          std::vector<Rat> r;
          for (const auto& cell : row) r.push_back(rat_in(cell));
          m2.p.push_back(std::move(r));
        }
        return social_welfare(truth, m2).str();
      },
      py::arg("values"), py::arg("p"), py::arg("normalization") = "unit-sum",
      "Expected sum of true values under an assignment matrix.");

  m.def(
      "verify_nash",
      [](const std::string& mechanism, const std::vector<std::vector<py::object>>& values,
         const std::vector<std::vector<int>>& strategies, const py::object& epsilon,
         const std::string& normalization, int exact_cap, const std::vector<int>& order) {
        EquilibriumReport rep =
            verify_pure_nash(mech_in(mechanism, exact_cap, order), values_in(values, normalization),
                             prefs_in(strategies), DeviationSpace::all(), rat_in(epsilon));
        return eq_out(rep);
      },
      py::arg("mechanism"), py::arg("values"), py::arg("strategies"),
      py::arg("epsilon") = py::int_(0), py::arg("normalization") = "unit-sum",
      py::arg("exact_cap") = 8, py::arg("order") = std::vector<int>{},
      "Check the strategy profile against every strict-order deviation.");

  m.def(
      "enumerate_nash",
      [](const std::string& mechanism, const std::vector<std::vector<py::object>>& values,
         const py::object& epsilon, const std::string& normalization, int exact_cap,
         const std::vector<int>& order) {
        std::vector<EquilibriumReport> eqs =
            enumerate_pure_nash(mech_in(mechanism, exact_cap, order),
                                values_in(values, normalization), rat_in(epsilon));
        py::list out;
        for (const auto& eq : eqs) out.append(eq_out(eq));
        return out;
      },
      py::arg("mechanism"), py::arg("values"), py::arg("epsilon") = py::int_(0),
      py::arg("normalization") = "unit-sum", py::arg("exact_cap") = 8,
      py::arg("order") = std::vector<int>{},
      "All pure equilibria over strict-order profiles (budgeted full enumeration).");

  m.def(
      "best_response_dynamics",
      [](const std::string& mechanism, const std::vector<std::vector<py::object>>& values,
         const std::vector<std::vector<int>>& init, std::uint64_t seed,
         const std::string& agent_order, const std::string& normalization, int exact_cap,
         const std::vector<int>& order) {
        ValuationProfile truth = values_in(values, normalization);
        PreferenceProfile start =
            init.empty() ? induced_profile(truth) : prefs_in(init);
        BrdOptions opt;
        opt.seed = seed;
        if (agent_order == "random")
          opt.order = AgentOrder::SeededRandom;
        else if (agent_order != "round-robin")
          throw ParseError("agent_order must be 'round-robin' or 'random'");
        BrdResult res = best_response_dynamics(mech_in(mechanism, exact_cap, order), truth,
                                               std::move(start), opt);
        py::dict d;
        d["profile"] = prefs_out(res.profile);
        d["converged"] = res.converged;
        d["passes"] = res.passes;
        d["evaluations"] = res.evaluations;
        d["report"] = res.report ? py::object(eq_out(*res.report)) : py::object(py::none());
        return d;
      },
      py::arg("mechanism"), py::arg("values"),
      py::arg("init") = std::vector<std::vector<int>>{}, py::arg("seed") = 0,
      py::arg("agent_order") = "round-robin", py::arg("normalization") = "unit-sum",
      py::arg("exact_cap") = 8, py::arg("order") = std::vector<int>{},
      "Iterated best response from init (default: truthful orders), re-verified at the end.");

  m.def(
      "no_regret",
      [](const std::string& mechanism, const std::vector<std::vector<py::object>>& values,
         std::uint64_t rounds, std::uint64_t seed, const std::string& learner, int checkpoints,
         const std::string& normalization, int exact_cap, const std::vector<int>& order) {
        LearnOptions opt;
        opt.rounds = rounds;
        opt.seed = seed;
        opt.learner = learner_from_string(learner);
        opt.checkpoints = checkpoints;
        LearnedDistribution res = no_regret_dynamics(mech_in(mechanism, exact_cap, order),
                                                     values_in(values, normalization), opt);
        py::dict d;
        d["rounds"] = res.rounds;
        d["seed"] = res.seed;
        std::vector<std::string> regrets;
        for (const Rat& r : res.avg_regret_exact) regrets.push_back(r.str());
        d["avg_regret"] = regrets;
        d["avg_welfare"] = res.avg_welfare_exact.str();
        d["play_counts"] = res.play_counts;
        py::list cps;
        for (const auto& [round, regret] : res.checkpoints) {
          py::dict cp;
          cp["round"] = round;
          cp["max_avg_regret"] = regret;
          cps.append(cp);
        }
        d["checkpoints"] = cps;
        return d;
      },
      py::arg("mechanism"), py::arg("values"), py::arg("rounds") = 1000, py::arg("seed") = 0,
      py::arg("learner") = "rm", py::arg("checkpoints") = 10,
      py::arg("normalization") = "unit-sum", py::arg("exact_cap") = 8,
      py::arg("order") = std::vector<int>{},
      "Independent no-regret learners ('rm' or 'mw') playing the mechanism.");

  m.def(
      "check_envy_free",
      [](const std::string& mechanism, int n, std::uint64_t count, std::uint64_t seed,
         int exact_cap, const std::vector<int>& order) {
        ProfileSource src =
            count == 0 ? ProfileSource::exhaustive(n) : ProfileSource::random(n, count, seed);
        return property_out(check_envy_free(mech_in(mechanism, exact_cap, order), src));
      },
      py::arg("mechanism"), py::arg("n"), py::arg("count") = 0, py::arg("seed") = 0,
      py::arg("exact_cap") = 8, py::arg("order") = std::vector<int>{},
      "Ordinal envy-freeness over all profiles (count=0) or a random sample.");

  m.def(
      "check_safe_strategy",
      [](const std::string& mechanism, int agent, const std::vector<int>& strategy,
         const std::vector<int>& true_order, std::uint64_t count, std::uint64_t seed,
         int exact_cap, const std::vector<int>& order) {
        OpponentSpace space =
            count == 0 ? OpponentSpace::exhaustive(4) : OpponentSpace::sampled(count, seed);
        PreferenceOrder truth{true_order.empty() ? strategy : true_order};
        return property_out(check_safe_strategy(mech_in(mechanism, exact_cap, order), agent,
                                                PreferenceOrder{strategy}, truth, space));
      },
      py::arg("mechanism"), py::arg("agent"), py::arg("strategy"),
      py::arg("true_order") = std::vector<int>{}, py::arg("count") = 0, py::arg("seed") = 0,
      py::arg("exact_cap") = 8, py::arg("order") = std::vector<int>{},
      "Does the row sd-dominate the uniform lottery against every opponent profile?");

  m.def(
      "ps_bounds_suite",
      [](std::uint64_t count, std::uint64_t seed, int n_min, int n_max) {
        RandomInstances src;
        src.count = count;
        src.seed = seed;
        src.n_min = n_min;
        src.n_max = n_max;
        py::list out;
        for (const auto& rep : ps_bounds_suite(src)) out.append(property_out(rep));
        return out;
      },
      py::arg("count") = 20, py::arg("seed") = 0, py::arg("n_min") = 3, py::arg("n_max") = 5,
      "The four exact inequality checks behind the eating welfare guarantee.");

  m.def(
      "construct",
      [](const std::string& family, int n, int k) {
        ConstructionParams params;
        params.family = family_from_string(family);
        params.n = n;
        params.k = k;
        params = params.resolved();
        ValuationProfile v;
        switch (params.family) {
          case Family::Thm4General: v = gen_thm4(params.k, params.alpha); break;
          case Family::Thm5Deterministic: v = gen_thm5(params.n).first; break;
          case Family::Thm6Pos: v = gen_thm6_pos(params.n, params.k); break;
          case Family::Thm10UnitRange: v = gen_thm10_unit_range(params.k, params.delta); break;
        }
        py::dict d;
        d["n"] = v.n;
        d["k"] = params.k;
        d["normalization"] = to_string(v.normalization);
        d["values"] = values_out(v);
        return d;
      },
      py::arg("family"), py::arg("n") = 0, py::arg("k") = 0,
      "Instance of an adversarial family: thm4, thm5, thm6, thm10.");

  m.def(
      "audit",
      [](const std::string& family, const std::string& mechanism, int n, int k,
         const std::string& mode, std::uint64_t seed, int exact_cap,
         const std::vector<int>& order) {
        ConstructionParams params;
        params.family = family_from_string(family);
        params.n = n;
        params.k = k;
        StrategyMode strategy = StrategyMode::truthful();
        if (mode == "brd")
          strategy = StrategyMode::brd(seed);
        else if (mode != "truthful")
          throw ParseError("mode must be 'truthful' or 'brd'");
        ConstructionReport rep =
            verify_construction(mech_in(mechanism, exact_cap, order), params, strategy);
        py::dict d;
        d["family"] = to_string(rep.family);
        d["mechanism"] = rep.mechanism;
        d["n"] = rep.n;
        d["k"] = rep.k;
        d["conclusive"] = rep.conclusive;
        d["welfare"] = rep.welfare.str();
        d["opt"] = rep.opt.str();
        d["ratio"] = rep.ratio.str();
        d["predicted_bound"] =
            rep.has_prediction ? py::object(py::str(rep.predicted_bound.str()))
                               : py::object(py::none());
        d["poa"] = rep.poa ? py::object(py::str(rep.poa->str())) : py::object(py::none());
        d["pos"] = rep.pos ? py::object(py::str(rep.pos->str())) : py::object(py::none());
        d["equilibria"] = static_cast<std::uint64_t>(rep.equilibria.size());
        d["notes"] = rep.notes;
        return d;
      },
      py::arg("family"), py::arg("mechanism"), py::arg("n") = 0, py::arg("k") = 0,
      py::arg("mode") = "truthful", py::arg("seed") = 0, py::arg("exact_cap") = 8,
      py::arg("order") = std::vector<int>{},
      "Run a family's verification pipeline and return the report.");
}
