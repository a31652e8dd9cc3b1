#include "matchpoa/rational.hpp"

#include <cctype>
#include <ostream>

#include "matchpoa/errors.hpp"

namespace matchpoa {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Rat::Rat(long long n) {
  // mpq_class has no long long constructor; go through text to stay exact
  // on LP64 and LLP64 alike.
  v_ = mpq_class(std::to_string(n), 10);
}

Rat::Rat(long long num, long long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  mpq_class q(mpz_class(std::to_string(num), 10), mpz_class(std::to_string(den), 10));
  q.canonicalize();
  v_ = std::move(q);
}

Rat Rat::from_mpq(mpq_class v) {
  v.canonicalize();
  Rat r;
  r.v_ = std::move(v);
  return r;
}

Rat Rat::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty rational literal");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
    if (s.empty()) throw ParseError("sign without digits in rational literal");
  }

  auto bad = [&text]() {
    return ParseError("bad rational literal '" + std::string(text) + "'");
  };

  // base 10 everywhere: gmp's default base 0 would read leading zeros as octal
  mpz_class num, den;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view p = s.substr(0, slash);
    std::string_view q = s.substr(slash + 1);
    if (!all_digits(p) || !all_digits(q)) throw bad();
    num = mpz_class(std::string(p), 10);
    den = mpz_class(std::string(q), 10);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw bad();
    if (!whole.empty() && !all_digits(whole)) throw bad();
    if (!frac.empty() && !all_digits(frac)) throw bad();
    std::string digits = std::string(whole) + std::string(frac);
    num = mpz_class(digits.empty() ? std::string("0") : digits, 10);
    den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
  } else {
    if (!all_digits(s)) throw bad();
    num = mpz_class(std::string(s), 10);
    den = 1;
  }

  if (negative) num = -num;
  mpq_class q(num, den);
  q.canonicalize();
  Rat r;
  r.v_ = std::move(q);
  return r;
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw DomainError("division by zero rational");
  v_ /= o.v_;
  return *this;
}

std::string Rat::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) {
  return os << r.str();
}

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace matchpoa
