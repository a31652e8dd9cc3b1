#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "matchpoa/errors.hpp"
#include "matchpoa/mechanisms.hpp"
#include "matchpoa/properties.hpp"
#include "matchpoa/rng.hpp"
#include "oracles.hpp"

using namespace matchpoa;

namespace {

PreferenceProfile prefs3(std::vector<int> a, std::vector<int> b, std::vector<int> c) {
  return {PreferenceOrder{std::move(a)}, PreferenceOrder{std::move(b)},
          PreferenceOrder{std::move(c)}};
}

}  // namespace

TEST_CASE("eating: two agents on one item, one alone") {
  auto prefs = prefs3({0, 1, 2}, {0, 1, 2}, {2, 1, 0});
  auto res = probabilistic_serial(prefs);
  CHECK(res.p.p[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)});
  CHECK(res.p.p[1] == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)});
  CHECK(res.p.p[2] == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
  CHECK(res.times.t == std::vector<Rat>{Rat(1, 2), Rat(1), Rat(1)});
}

TEST_CASE("eating: identical preferences give the uniform lottery") {
  for (int n : {2, 3, 5}) {
    PreferenceProfile prefs(n);
    for (auto& o : prefs) {
      o.ranking.resize(n);
      std::iota(o.ranking.begin(), o.ranking.end(), 0);
    }
    auto res = probabilistic_serial(prefs);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(res.p.p[i][j] == Rat(1, n));
    for (int j = 0; j < n; ++j) CHECK(res.times.t[j] == Rat(j + 1, n));
  }
}

TEST_CASE("eating outcomes are fixed points of their exhaustion times") {
  Rng rng(101);
  for (int rep = 0; rep < 60; ++rep) {
    int n = 2 + rng.index(5);
    auto prefs = random_preference_profile(n, rng);
    auto res = probabilistic_serial(prefs);
    std::string why;
    CHECK_MESSAGE(oracle::ps_fixed_point_ok(prefs, res, &why), why);
    CHECK(is_bistochastic(res.p));
  }
}

TEST_CASE("int64 eating layer agrees with the exact one") {
  Rng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 2 + rng.index(5);
    auto prefs = random_preference_profile(n, rng);
    auto raw = detail::ps_raw_int64(prefs);
    REQUIRE(raw.ok);
    auto res = probabilistic_serial(prefs);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(Rat(raw.pnum[static_cast<size_t>(i) * n + j], raw.D) == res.p.p[i][j]);
    for (int j = 0; j < n; ++j) CHECK(Rat(raw.tnum[j], raw.D) == res.times.t[j]);
  }
}

TEST_CASE("serial dictatorship picks best remaining in order") {
  auto prefs = prefs3({1, 0, 2}, {1, 2, 0}, {1, 2, 0});
  CHECK(serial_dictatorship(prefs, {0, 1, 2}).item_of == std::vector<int>{1, 2, 0});
  CHECK(serial_dictatorship(prefs, {2, 1, 0}).item_of == std::vector<int>{0, 2, 1});
  CHECK(serial_dictatorship(prefs, {1, 2, 0}).item_of == std::vector<int>{0, 1, 2});
}

TEST_CASE("uniform priority matches the recursive oracle") {
  Rng rng(55);
  for (int rep = 0; rep < 24; ++rep) {
    int n = 2 + rng.index(4);
    auto prefs = random_preference_profile(n, rng);
    auto fast = random_priority_exact(prefs);
    auto slow = oracle::rp_recursive(prefs);
    CHECK(fast.p == slow.p);
    CHECK(is_bistochastic(fast));
    CHECK_FALSE(fast.sampled.has_value());
  }
}

TEST_CASE("uniform priority hand case") {
  // both want item 0: winner takes it, loser gets item 1
  PreferenceProfile prefs = {PreferenceOrder{{0, 1}}, PreferenceOrder{{0, 1}}};
  auto m = random_priority_exact(prefs);
  CHECK(m.p[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
  CHECK(m.p[1] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
}

TEST_CASE("exact averaging respects its cap") {
  Rng rng(9);
  auto prefs = random_preference_profile(4, rng);
  CHECK_THROWS_AS(random_priority_exact(prefs, RpOptions{3}), CapacityError);
  CHECK_NOTHROW(random_priority_exact(prefs, RpOptions{4}));
}

TEST_CASE("sampled priority is deterministic per seed and records provenance") {
  Rng rng(12);
  auto prefs = random_preference_profile(4, rng);
  auto a = random_priority_sampled(prefs, 42, 2000);
  auto b = random_priority_sampled(prefs, 42, 2000);
  CHECK(a.p == b.p);
  REQUIRE(a.sampled.has_value());
  CHECK(a.sampled->seed == 42);
  CHECK(a.sampled->trials == 2000);
  for (int i = 0; i < 4; ++i) {
    Rat row(0);
    for (int j = 0; j < 4; ++j) row += a.p[i][j];
    CHECK(row == Rat(1));
  }
  auto c = random_priority_sampled(prefs, 43, 2000);
  CHECK(a.p != c.p);  // a collision would need 2000 identical draws
}

TEST_CASE("dictator lottery hand case") {
  auto prefs = prefs3({0, 1, 2}, {0, 1, 2}, {2, 1, 0});
  auto m = random_dictatorial(prefs);
  CHECK(m.p[0] == std::vector<Rat>{Rat(1, 3), Rat(2, 3), Rat(0)});
  CHECK(m.p[1] == std::vector<Rat>{Rat(2, 3), Rat(1, 3), Rat(0)});
  CHECK(m.p[2] == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
}

TEST_CASE("dictator lottery is bistochastic and favors the reported top") {
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    int n = 2 + rng.index(5);
    auto prefs = random_preference_profile(n, rng);
    auto m = random_dictatorial(prefs);
    CHECK(is_bistochastic(m));
    for (int i = 0; i < n; ++i) CHECK(m.p[i][prefs[i].ranking[0]] >= Rat(1, n));
  }
}

TEST_CASE("reported-welfare maximizer matches the permutation scan") {
  Rng rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 2 + rng.index(4);
    auto v = random_unit_sum_profile(n, 1000, rng);
    auto mu = naive_max_welfare(v);
    auto [bm, bw] = oracle::brute_opt(v);
    CHECK(mu.item_of == bm.item_of);
    Rat w(0);
    for (int i = 0; i < n; ++i) w += v.values[i][mu.item_of[i]];
    CHECK(w == bw);
  }
}

TEST_CASE("reported-welfare maximizer breaks ties lexicographically") {
  auto v = oracle::make_profile({{Rat(1, 3), Rat(1, 3), Rat(1, 3)},
                                 {Rat(1, 3), Rat(1, 3), Rat(1, 3)},
                                 {Rat(1, 3), Rat(1, 3), Rat(1, 3)}},
                                Normalization::UnitSum);
  CHECK(naive_max_welfare(v).item_of == std::vector<int>{0, 1, 2});

  // two optima: (0,1) and (1,0); the lexicographically smaller vector wins
  auto w = oracle::make_profile({{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}},
                                Normalization::UnitSum);
  CHECK(naive_max_welfare(w).item_of == std::vector<int>{0, 1});
}

TEST_CASE("mechanism handles") {
  for (const char* name : {"ps", "rp", "sd", "rd", "naive"}) {
    CHECK(mechanism_from_string(name).name() == name);
  }
  CHECK_THROWS_AS(mechanism_from_string("PS"), ParseError);
  CHECK(Mechanism::naive().ordinal() == false);
  CHECK(Mechanism::ps().ordinal());

  Rng rng(3);
  auto prefs = random_preference_profile(3, rng);
  CHECK_THROWS_AS(run_ordinal(Mechanism::naive(), prefs), DomainError);
  CHECK(run_ordinal(Mechanism::ps(), prefs).p == probabilistic_serial(prefs).p.p);
  CHECK(run_ordinal(Mechanism::rp(), prefs).p == random_priority_exact(prefs).p);
  // default dictator order is by agent index
  CHECK(run_ordinal(Mechanism::sd({}), prefs).p ==
        matrix_of(serial_dictatorship(prefs, {0, 1, 2}), 3).p);
}
