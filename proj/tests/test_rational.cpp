#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <unordered_set>

#include "matchpoa/errors.hpp"
#include "matchpoa/rational.hpp"

using matchpoa::Rat;

TEST_CASE("construction reduces to lowest terms with positive denominator") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-2, 4) == Rat(-1, 2));
  CHECK(Rat(2, -4) == Rat(-1, 2));
  CHECK(Rat(-2, -4) == Rat(1, 2));
  CHECK(Rat(0, 7) == Rat(0));
  CHECK(Rat(6, 3).is_integer());
  CHECK(Rat(6, 3).num() == 2);
  CHECK(Rat(6, 3).den() == 1);
  CHECK(Rat(2, -4).den() == 2);
  CHECK_THROWS_AS(Rat(1, 0), matchpoa::DomainError);
}

TEST_CASE("long long constructor is exact at the extremes") {
  long long big = 9'007'199'254'740'993LL;  // 2^53 + 1, not double-representable
  CHECK(Rat(big).str() == "9007199254740993");
  CHECK(Rat(-big) == -Rat(big));
}

TEST_CASE("parse accepts integers, fractions, decimals and signs") {
  CHECK(Rat::parse("3") == Rat(3));
  CHECK(Rat::parse("-3") == Rat(-3));
  CHECK(Rat::parse("+3") == Rat(3));
  CHECK(Rat::parse("3/6") == Rat(1, 2));
  CHECK(Rat::parse("-3/6") == Rat(-1, 2));
  CHECK(Rat::parse("0.25") == Rat(1, 4));
  CHECK(Rat::parse("-0.125") == Rat(-1, 8));
  CHECK(Rat::parse("2.") == Rat(2));
  CHECK(Rat::parse(".5") == Rat(1, 2));
  CHECK(Rat::parse(" 7/2 ") == Rat(7, 2));
  CHECK(Rat::parse("0.1") == Rat(1, 10));
}

TEST_CASE("leading zeros are decimal, never octal") {
  CHECK(Rat::parse("007") == Rat(7));
  CHECK(Rat::parse("010/020") == Rat(1, 2));
  CHECK(Rat::parse("0.025") == Rat(1, 40));
  CHECK(Rat::parse("-0010") == Rat(-10));
}

TEST_CASE("parse rejects malformed literals") {
  for (const char* bad : {"", " ", "-", "1/0", "1//2", "a", "1/a", "1.2.3", "1 2", "0x10", "1e3",
                          "--1", "1/-2", "."}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Rat::parse(bad), matchpoa::ParseError);
  }
}

TEST_CASE("arithmetic is exact") {
  Rat third(1, 3);
  CHECK(third + third + third == Rat(1));
  CHECK(Rat(1) - Rat(1, 10) - Rat(1, 10) - Rat(1, 10) == Rat(7, 10));
  CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
  CHECK(Rat(5, 6) / Rat(10, 3) == Rat(1, 4));
  CHECK(-Rat(3, 7) + Rat(3, 7) == Rat(0));
  CHECK_THROWS_AS(Rat(1) / Rat(0), matchpoa::DomainError);

  // repeated halving and re-summing round-trips exactly
  Rat x(1);
  Rat sum(0);
  for (int i = 0; i < 60; ++i) {
    x /= Rat(2);
    sum += x;
  }
  CHECK(sum + x == Rat(1));
}

TEST_CASE("comparisons order by value, not representation") {
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(-1, 2) < Rat(-1, 3));
  CHECK(Rat(2, 6) <= Rat(1, 3));
  CHECK(Rat(2, 6) >= Rat(1, 3));
  CHECK(Rat(7, 2) > Rat(3));
  CHECK(Rat(1, 3) != Rat(2, 3));
}

TEST_CASE("str round-trips through parse") {
  for (long long num : {-7LL, -1LL, 0LL, 1LL, 22LL}) {
    for (long long den : {1LL, 2LL, 3LL, 97LL}) {
      Rat r(num, den);
      CHECK(Rat::parse(r.str()) == r);
    }
  }
  CHECK(Rat(1, 2).str() == "1/2");
  CHECK(Rat(-4, 2).str() == "-2");
  CHECK(Rat(0).str() == "0");
  std::ostringstream os;
  os << Rat(22, 7);
  CHECK(os.str() == "22/7");
}

TEST_CASE("from_mpq canonicalizes foreign values") {
  mpq_class raw(4, 8);  // gmpxx does not canonicalize this constructor
  Rat r = Rat::from_mpq(raw);
  CHECK(r == Rat(1, 2));
  CHECK(r.num() == 1);
  CHECK(r.den() == 2);
}

TEST_CASE("approx, sign and helpers") {
  CHECK(Rat(1, 4).approx() == doctest::Approx(0.25));
  CHECK(Rat(-3).sign() == -1);
  CHECK(Rat(0).sign() == 0);
  CHECK(Rat(0).is_zero());
  CHECK(matchpoa::abs(Rat(-5, 3)) == Rat(5, 3));
  CHECK(matchpoa::min(Rat(1, 3), Rat(1, 4)) == Rat(1, 4));
  CHECK(matchpoa::max(Rat(1, 3), Rat(1, 4)) == Rat(1, 3));
}
