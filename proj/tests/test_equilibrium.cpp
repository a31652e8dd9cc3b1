#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "matchpoa/equilibrium.hpp"
#include "matchpoa/errors.hpp"
#include "matchpoa/properties.hpp"
#include "matchpoa/rng.hpp"
#include "matchpoa/welfare.hpp"
#include "oracles.hpp"

using namespace matchpoa;

namespace {

const std::vector<Mechanism> kOrdinalMechs = {Mechanism::ps(), Mechanism::rp(),
                                              Mechanism::rd(), Mechanism::sd({})};

}  // namespace

TEST_CASE("expected_utility equals a direct mechanism run") {
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + rng.index(3);
    auto truth = random_unit_sum_profile(n, 1000, rng);
    auto strategies = random_preference_profile(n, rng);
    for (const auto& mech : kOrdinalMechs) {
      auto m = run_ordinal(mech, strategies);
      for (int a = 0; a < n; ++a) {
        CHECK(expected_utility(mech, truth.values[a], strategies, a) ==
              row_utility(truth.values[a], m.p[a]));
      }
    }
  }
}

TEST_CASE("best_response matches the rerun-everything scan") {
  Rng rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    auto truth = random_unit_sum_profile(3, 1000, rng);
    auto strategies = random_preference_profile(3, rng);
    for (const auto& mech : kOrdinalMechs) {
      for (int a = 0; a < 3; ++a) {
        auto fast = best_response(mech, truth.values[a], strategies, a, DeviationSpace::all());
        auto [slow_s, slow_u] = oracle::brute_best_response(mech, truth.values[a], strategies, a);
        CHECK(fast.utility == slow_u);
        CHECK(fast.strategy == slow_s);
        CHECK(fast.evaluations == 6);
      }
    }
  }
}

TEST_CASE("best_response over a restricted space") {
  auto truth = oracle::make_profile({{Rat(1, 2), Rat(1, 3), Rat(1, 6)},
                                     {Rat(1, 6), Rat(1, 3), Rat(1, 2)},
                                     {Rat(1, 3), Rat(1, 3), Rat(1, 3)}},
                                    Normalization::UnitSum);
  auto strategies = induced_profile(truth);

  // explicit list: only the listed candidates are scanned
  std::vector<PreferenceOrder> list = {PreferenceOrder{{2, 1, 0}}, PreferenceOrder{{2, 0, 1}},
                                       PreferenceOrder{{2, 1, 0}}};
  auto br = best_response(Mechanism::ps(), truth.values[0], strategies, 0,
                          DeviationSpace::explicit_list(list));
  CHECK(br.evaluations == 2);  // duplicate removed
  CHECK((br.strategy == PreferenceOrder{{2, 0, 1}} || br.strategy == PreferenceOrder{{2, 1, 0}}));

  // top-1 keeps everything fixed: utility equals the current one
  auto frozen = best_response(Mechanism::ps(), truth.values[0], strategies, 0,
                              DeviationSpace::top(1));
  CHECK(frozen.evaluations == 1);
  CHECK(frozen.utility == expected_utility(Mechanism::ps(), truth.values[0], strategies, 0));
}

TEST_CASE("deviation spaces: sizes, candidates, descriptions") {
  DeviationSpace all = DeviationSpace::all();
  CHECK(all.size(4) == 24);
  CHECK(all.candidates(3, PreferenceOrder{{2, 1, 0}}).size() == 6);

  DeviationSpace top2 = DeviationSpace::top(2);
  CHECK(top2.size(4) == 2);
  auto cands = top2.candidates(4, PreferenceOrder{{3, 1, 0, 2}});
  REQUIRE(cands.size() == 2);
  // head {1,3} permuted over the frozen tail (0,2)
  CHECK(cands[0].ranking == std::vector<int>{1, 3, 0, 2});
  CHECK(cands[1].ranking == std::vector<int>{3, 1, 0, 2});
  CHECK_THROWS_AS(DeviationSpace::top(5).size(4), ShapeError);
  CHECK_THROWS_AS(DeviationSpace::top(0).size(4), ShapeError);

  auto listed = DeviationSpace::explicit_list(
      {PreferenceOrder{{1, 0}}, PreferenceOrder{{0, 1}}, PreferenceOrder{{1, 0}}});
  auto lc = listed.candidates(2, PreferenceOrder{{0, 1}});
  REQUIRE(lc.size() == 2);  // sorted, deduplicated
  CHECK(lc[0].ranking == std::vector<int>{0, 1});
  CHECK(lc[1].ranking == std::vector<int>{1, 0});

  CHECK(all.describe(3) == "all-strict-orders(6)");
  CHECK(DeviationSpace::top(2).describe(3) == "top-2-permutations");
  CHECK(listed.describe(2) == "explicit-list(3)");
}

TEST_CASE("eval budget caps deviation scans") {
  auto truth = oracle::make_profile({{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}},
                                    Normalization::UnitSum);
  auto strategies = induced_profile(truth);
  EqOptions tiny;
  tiny.eval_budget = 1;
  CHECK_THROWS_AS(
      best_response(Mechanism::ps(), truth.values[0], strategies, 0, DeviationSpace::all(), tiny),
      CapacityError);
}

TEST_CASE("truthful eating is an equilibrium on a two-agent instance") {
  auto truth = oracle::make_profile({{Rat(3, 4), Rat(1, 4)}, {Rat(2, 3), Rat(1, 3)}},
                                    Normalization::UnitSum);
  auto rep = verify_pure_nash(Mechanism::ps(), truth, induced_profile(truth),
                              DeviationSpace::all());
  CHECK(rep.verified);
  CHECK(rep.max_gain <= Rat(0));
  CHECK_FALSE(rep.witness.has_value());
  CHECK(rep.welfare == social_welfare(truth, probabilistic_serial(induced_profile(truth)).p));
  CHECK(rep.epsilon == Rat(0));
  CHECK(rep.deviation_space == "all-strict-orders(2)");
}

TEST_CASE("a profitable deviation is reported with an exact replayable gain") {
  // both agents prefer item 0, but agent 0 strictly more; pointing agent 0 at
  // item 1 is not an equilibrium under eating: she can fight for item 0
  auto truth = oracle::make_profile({{Rat(4, 5), Rat(1, 5)}, {Rat(3, 5), Rat(2, 5)}},
                                    Normalization::UnitSum);
  PreferenceProfile prof = {PreferenceOrder{{1, 0}}, PreferenceOrder{{0, 1}}};
  auto rep = verify_pure_nash(Mechanism::ps(), truth, prof, DeviationSpace::all());
  CHECK_FALSE(rep.verified);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->gain == rep.max_gain);
  CHECK(rep.max_gain > Rat(0));

  // replaying the witness yields exactly the claimed gain
  int a = rep.witness->agent;
  Rat before = expected_utility(Mechanism::ps(), truth.values[a], prof, a);
  PreferenceProfile deviated = prof;
  deviated[a] = rep.witness->strategy;
  Rat after = expected_utility(Mechanism::ps(), truth.values[a], deviated, a);
  CHECK(after - before == rep.max_gain);
}

TEST_CASE("epsilon tolerance flips marginal profiles to verified") {
  auto truth = oracle::make_profile({{Rat(4, 5), Rat(1, 5)}, {Rat(3, 5), Rat(2, 5)}},
                                    Normalization::UnitSum);
  PreferenceProfile prof = {PreferenceOrder{{1, 0}}, PreferenceOrder{{0, 1}}};
  auto strict = verify_pure_nash(Mechanism::ps(), truth, prof, DeviationSpace::all());
  REQUIRE_FALSE(strict.verified);
  auto relaxed = verify_pure_nash(Mechanism::ps(), truth, prof, DeviationSpace::all(),
                                  strict.max_gain);
  CHECK(relaxed.verified);
  CHECK_FALSE(relaxed.witness.has_value());
  CHECK(relaxed.max_gain == strict.max_gain);
}

TEST_CASE("enumeration agrees with the brute-force scan") {
  Rng rng(37);
  SUBCASE("two agents, several instances") {
    for (int rep = 0; rep < 4; ++rep) {
      auto truth = random_unit_sum_profile(2, 1000, rng);
      for (const auto& mech : kOrdinalMechs) {
        auto fast = enumerate_pure_nash(mech, truth);
        auto slow = oracle::brute_enumerate_nash(mech, truth);
        REQUIRE(fast.size() == slow.size());
        for (size_t i = 0; i < fast.size(); ++i) {
          CHECK(fast[i].profile == slow[i]);
          CHECK(fast[i].verified);
        }
      }
    }
  }
  SUBCASE("three agents, one instance, eating and dictator lottery") {
    auto truth = random_unit_sum_profile(3, 1000, rng);
    for (const auto& mech : {Mechanism::ps(), Mechanism::rd()}) {
      auto fast = enumerate_pure_nash(mech, truth);
      auto slow = oracle::brute_enumerate_nash(mech, truth);
      REQUIRE(fast.size() == slow.size());
      for (size_t i = 0; i < fast.size(); ++i) CHECK(fast[i].profile == slow[i]);
      CHECK_FALSE(fast.empty());  // truthful-top profiles exist for these mechanisms
    }
  }
}

TEST_CASE("enumeration respects its profile budget") {
  Rng rng(41);
  auto truth = random_unit_sum_profile(3, 1000, rng);
  EnumerateOptions small;
  small.profile_budget = 100;  // (3!)^3 = 216 > 100
  CHECK_THROWS_AS(enumerate_pure_nash(Mechanism::ps(), truth, Rat(0), small), CapacityError);
  auto truth5 = random_unit_sum_profile(5, 1000, rng);
  CHECK_THROWS_AS(enumerate_pure_nash(Mechanism::ps(), truth5), CapacityError);
}

TEST_CASE("best response dynamics converge and re-verify") {
  Rng rng(43);
  for (int rep = 0; rep < 6; ++rep) {
    int n = 2 + rng.index(3);
    auto truth = random_unit_sum_profile(n, 1000, rng);
    for (auto order : {AgentOrder::RoundRobin, AgentOrder::SeededRandom}) {
      BrdOptions opt;
      opt.order = order;
      opt.seed = 11;
      auto res = best_response_dynamics(Mechanism::ps(), truth, random_preference_profile(n, rng),
                                        opt);
      REQUIRE(res.converged);
      REQUIRE(res.report.has_value());
      CHECK(res.report->verified);
      CHECK(res.report->profile == res.profile);
      CHECK(res.passes >= 1);
      CHECK(res.evaluations > 0);
    }
  }
}

TEST_CASE("dynamics from an equilibrium stay put") {
  auto truth = oracle::make_profile({{Rat(3, 4), Rat(1, 4)}, {Rat(2, 3), Rat(1, 3)}},
                                    Normalization::UnitSum);
  auto init = induced_profile(truth);
  auto res = best_response_dynamics(Mechanism::ps(), truth, init);
  CHECK(res.converged);
  CHECK(res.profile == init);
  CHECK(res.passes == 1);
}

TEST_CASE("cardinal grid: row counts and contents") {
  GridSpace g;
  g.D = 4;
  CHECK(g.rows(2) == 5);    // compositions of 4 into 2 parts
  CHECK(g.rows(3) == 15);   // C(6,2)
  auto rows = g.all_rows(3);
  CHECK(rows.size() == 15);
  std::set<std::vector<Rat>> uniq(rows.begin(), rows.end());
  CHECK(uniq.size() == rows.size());
  for (const auto& r : rows) {
    Rat sum(0);
    for (const Rat& x : r) {
      sum += x;
      CHECK(x >= Rat(0));
      CHECK(x.den() <= 4);  // multiples of 1/4 stay on the grid after reduction
    }
    CHECK(sum == Rat(1));
  }
  CHECK(g.describe(3).find("grid") != std::string::npos);
}

TEST_CASE("cardinal verification flags a profitable misreport") {
  auto truth = oracle::make_profile({{Rat(3, 4), Rat(1, 4)}, {Rat(2, 3), Rat(1, 3)}},
                                    Normalization::UnitSum);
  auto rep = verify_cardinal_nash(truth, truth.values);
  CHECK_FALSE(rep.verified);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->agent == 1);
  CHECK(rep.witness->gain == rep.max_gain);
  CHECK(rep.max_gain == Rat(1, 3));  // item 2 at 1/3 swaps for item 1 at 2/3

  // replay: the witness report flips the reported-welfare maximizer
  auto reports = truth.values;
  reports[1] = rep.witness->report;
  auto v = truth;
  v.values = reports;
  v.normalization = Normalization::Unchecked;
  Matching mu = naive_max_welfare(v);
  CHECK(truth.values[1][mu.item_of[1]] == Rat(2, 3));
}

TEST_CASE("cardinal verification certifies an indicator equilibrium") {
  auto truth = oracle::make_profile({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}},
                                    Normalization::UnitSum);
  auto rep = verify_cardinal_nash(truth, truth.values);
  CHECK(rep.verified);
  CHECK(rep.welfare == Rat(2));
  CHECK(rep.deviation_space.find("grid") != std::string::npos);
}
