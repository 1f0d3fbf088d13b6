#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace treemax {

// Exact rational with 64-bit components, used for weight exponents so that
// power weights never accumulate rounding. Intermediate products go through
// __int128 and overflow raises instead of wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Accepts integer or plain decimal text: "3", "-0.75", "1.5".
  static Rational parse(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') {
      neg = s[pos] == '-';
      ++pos;
    }
    long long ipart = 0;
    bool any = false;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ipart = check(static_cast<__int128>(ipart) * 10 + (s[pos] - '0'));
      ++pos;
      any = true;
    }
    long long fnum = 0, fden = 1;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        fnum = check(static_cast<__int128>(fnum) * 10 + (s[pos] - '0'));
        fden = check(static_cast<__int128>(fden) * 10);
        ++pos;
        any = true;
      }
    }
    if (!any || pos != s.size())
      throw std::invalid_argument("bad rational literal: " + std::string(s));
    Rational r(check(static_cast<__int128>(ipart) * fden + fnum), fden);
    return neg ? -r : r;
  }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_, tag{}); }
  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(check(i128(a.num_) * b.den_ + i128(b.num_) * a.den_),
                    check(i128(a.den_) * b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(check(i128(a.num_) * b.num_), check(i128(a.den_) * b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("rational division by zero");
    return Rational(check(i128(a.num_) * b.den_), check(i128(a.den_) * b.num_));
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  struct tag {};
  using i128 = __int128;
  Rational(long long n, long long d, tag) : num_(n), den_(d) {}

  static long long check(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
      throw std::overflow_error("rational arithmetic overflow");
    return static_cast<long long>(v);
  }

  void normalize() {
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    if (den_ < 0) {
      num_ = check(-i128(num_));
      den_ = check(-i128(den_));
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  long long num_, den_;
};

}  // namespace treemax
