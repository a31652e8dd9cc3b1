#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace matchpoa {

// Exact rational number. Always held in lowest terms with a positive
// denominator, which makes equality and hashing structural. Arithmetic is
// exact; there is no implicit conversion to or from floating point.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}               // NOLINT: implicit by design
  Rat(long n) : v_(n) {}              // NOLINT
  Rat(long long n);                   // NOLINT
  Rat(long long num, long long den);  // reduces; den must be nonzero

  // Accepts "p", "-p", "p/q" and finite decimals such as "0.25".
  static Rat parse(std::string_view text);
  explicit Rat(std::string_view text) : Rat(parse(text)) {}
  explicit Rat(const char* text) : Rat(parse(text)) {}

  static Rat from_mpq(mpq_class v);  // canonicalizes

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  // Lowest-terms text, "p" when the denominator is one, otherwise "p/q".
  std::string str() const;
  double approx() const { return v_.get_d(); }

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend Rat operator-(const Rat& a) { Rat r; r.v_ = -a.v_; return r; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r);

 private:
  mpq_class v_;  // invariant: canonical
};

Rat abs(const Rat& r);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

}  // namespace matchpoa
