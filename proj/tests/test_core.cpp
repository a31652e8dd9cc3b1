#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>

#include "matchpoa/core.hpp"
#include "matchpoa/errors.hpp"
#include "matchpoa/io.hpp"
#include "oracles.hpp"

using namespace matchpoa;

TEST_CASE("normalization names round-trip") {
  for (auto n : {Normalization::UnitSum, Normalization::UnitRange, Normalization::Unchecked}) {
    CHECK(normalization_from_string(to_string(n)) == n);
  }
  CHECK_THROWS_AS(normalization_from_string("unit_sum"), ParseError);
}

TEST_CASE("validate_profile enforces shape and the declared normalization") {
  auto v = oracle::make_profile({{Rat(1, 2), Rat(1, 3), Rat(1, 6)},
                                 {Rat(1, 3), Rat(1, 3), Rat(1, 3)},
                                 {Rat(1), Rat(0), Rat(0)}},
                                Normalization::UnitSum);
  CHECK(validate_profile(v).ok);

  SUBCASE("bad row sum") {
    v.values[1][0] = Rat(1, 2);
    auto res = validate_profile(v);
    CHECK_FALSE(res.ok);
    CHECK(res.agent == 1);
    CHECK(res.message.find("sum to") != std::string::npos);
  }
  SUBCASE("negative entry") {
    v.values[2] = {Rat(3, 2), Rat(-1, 2), Rat(0)};
    CHECK_FALSE(validate_profile(v).ok);
  }
  SUBCASE("ragged row") {
    v.values[0].pop_back();
    auto res = validate_profile(v);
    CHECK_FALSE(res.ok);
    CHECK(res.agent == 0);
  }
  SUBCASE("wrong row count") {
    v.values.pop_back();
    CHECK_FALSE(validate_profile(v).ok);
  }
  SUBCASE("unchecked skips the sum test") {
    v.values[1][0] = Rat(1, 2);
    v.normalization = Normalization::Unchecked;
    CHECK(validate_profile(v).ok);
  }
}

TEST_CASE("validate_profile unit-range needs a one and a zero") {
  auto v = oracle::make_profile({{Rat(1), Rat(1, 2), Rat(0)}, {Rat(0), Rat(1), Rat(1, 4)},
                                 {Rat(1), Rat(0), Rat(0)}},
                                Normalization::UnitRange);
  CHECK(validate_profile(v).ok);
  v.values[0][0] = Rat(3, 4);  // max no longer 1
  CHECK_FALSE(validate_profile(v).ok);
}

TEST_CASE("induced_order sorts by value with ties to the lower index") {
  CHECK(induced_order({Rat(1, 6), Rat(1, 2), Rat(1, 3)}).ranking == std::vector<int>{1, 2, 0});
  CHECK(induced_order({Rat(1, 3), Rat(1, 3), Rat(1, 3)}).ranking == std::vector<int>{0, 1, 2});
  CHECK(induced_order({Rat(0), Rat(1, 2), Rat(1, 2)}).ranking == std::vector<int>{1, 2, 0});
}

TEST_CASE("all_strict_orders is lexicographic and complete") {
  auto orders = all_strict_orders(3);
  REQUIRE(orders.size() == 6);
  CHECK(orders.front().ranking == std::vector<int>{0, 1, 2});
  CHECK(orders.back().ranking == std::vector<int>{2, 1, 0});
  CHECK(std::is_sorted(orders.begin(), orders.end()));
  for (const auto& o : orders) CHECK(is_permutation_of_items(o.ranking, 3));
}

TEST_CASE("factorial") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(4) == 24);
  CHECK(factorial(20) == 2'432'902'008'176'640'000ULL);
  CHECK_THROWS_AS(factorial(21), CapacityError);
  CHECK_THROWS_AS(factorial(-1), CapacityError);
}

TEST_CASE("is_permutation_of_items") {
  CHECK(is_permutation_of_items({2, 0, 1}, 3));
  CHECK_FALSE(is_permutation_of_items({0, 0, 1}, 3));
  CHECK_FALSE(is_permutation_of_items({0, 1}, 3));
  CHECK_FALSE(is_permutation_of_items({0, 1, 3}, 3));
}

TEST_CASE("matrix_of and is_bistochastic") {
  Matching mu{{2, 0, 1}};
  auto m = matrix_of(mu, 3);
  CHECK(m.p[0][2] == Rat(1));
  CHECK(m.p[1][0] == Rat(1));
  CHECK(is_bistochastic(m));

  SUBCASE("row sums must be one") {
    m.p[0][2] = Rat(1, 2);
    CHECK_FALSE(is_bistochastic(m));
  }
  SUBCASE("column sums must be one") {
    m.p[0][2] = Rat(0);
    m.p[0][0] = Rat(1);  // rows still sum to one, column 0 now sums to two
    CHECK_FALSE(is_bistochastic(m));
  }
  SUBCASE("entries must be nonnegative") {
    m.p[0] = {Rat(3, 2), Rat(-1, 2), Rat(0)};
    CHECK_FALSE(is_bistochastic(m));
  }
}

TEST_CASE("row_utility") {
  CHECK(row_utility({Rat(1, 2), Rat(1, 3), Rat(1, 6)}, {Rat(1, 4), Rat(1, 4), Rat(1, 2)}) ==
        Rat(1, 2) * Rat(1, 4) + Rat(1, 3) * Rat(1, 4) + Rat(1, 6) * Rat(1, 2));
  CHECK_THROWS_AS(row_utility({Rat(1)}, {Rat(1), Rat(0)}), ShapeError);
}

TEST_CASE("instance JSON round-trips") {
  auto v = oracle::make_profile({{Rat(1, 2), Rat(1, 3), Rat(1, 6)},
                                 {Rat(1, 3), Rat(1, 3), Rat(1, 3)},
                                 {Rat(1), Rat(0), Rat(0)}},
                                Normalization::UnitSum);
  auto text = serialize_instance(v);
  auto back = parse_instance(text);
  CHECK(back.n == 3);
  CHECK(back.normalization == Normalization::UnitSum);
  CHECK(back.values == v.values);
  CHECK(serialize_instance(back) == text);
}

TEST_CASE("parse_instance rejects malformed input") {
  CHECK_THROWS_AS(parse_instance("not json"), ParseError);
  CHECK_THROWS_AS(parse_instance("[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"n": 2, "normalization": "unit-sum"})"), ParseError);
  CHECK_THROWS_AS(
      parse_instance(
          R"({"n": 2, "normalization": "unit-sum", "valuations": [["1/2","1/2"]]})"),
      ShapeError);
  CHECK_THROWS_AS(
      parse_instance(
          R"({"n": 2, "normalization": "unit-sum", "valuations": [[0.5,0.5],["1","0"]]})"),
      ParseError);
  // validation failure surfaces as ParseError with the row message
  CHECK_THROWS_WITH_AS(
      parse_instance(
          R"({"n": 2, "normalization": "unit-sum", "valuations": [["1/2","1/3"],["1","0"]]})"),
      doctest::Contains("sum to"), ParseError);
}

TEST_CASE("strategies JSON round-trips and validates") {
  PreferenceProfile prefs = {PreferenceOrder{{1, 0, 2}}, PreferenceOrder{{2, 1, 0}},
                             PreferenceOrder{{0, 1, 2}}};
  auto text = serialize_strategies(prefs);
  CHECK(parse_strategies(text, 3) == prefs);
  CHECK_THROWS_AS(parse_strategies(text, 4), ShapeError);
  CHECK_THROWS_AS(parse_strategies(R"({"orders": [[1,2],[2,2]]})", 2), ShapeError);
  CHECK_THROWS_AS(parse_strategies(R"({"orders": 3})", 2), ParseError);
}

TEST_CASE("csv renderers") {
  Matching mu{{1, 0}};
  auto m = matrix_of(mu, 2);
  CHECK(assignment_csv(m) == "agent,item_1,item_2\n1,0,1\n2,1,0\n");
  PreferenceProfile prefs = {PreferenceOrder{{1, 0}}, PreferenceOrder{{0, 1}}};
  CHECK(profile_csv(prefs) == "agent,rank_1,rank_2\n1,2,1\n2,1,2\n");
}

TEST_CASE("read_file and write_file") {
  std::string path = "core_io_roundtrip.tmp";
  write_file(path, "payload\n");
  CHECK(read_file(path) == "payload\n");
  CHECK_THROWS_AS(read_file("does/not/exist"), ParseError);
  std::remove(path.c_str());
}
