#pragma once

#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treemax/rational.hpp"
#include "treemax/tree.hpp"

namespace treemax {

// A weight whose value depends only on depth, held in log_k domain.
// power(a) keeps its exponent as an exact rational: log_k φ(j) = a*j with no
// rounding. table weights list log_k values per level and continue past the
// table geometrically with the last ratio, so truncated data never silently
// zeroes the tail.
class LevelWeight {
 public:
  enum class Kind { kPower, kTable };

  static LevelWeight power(Rational a) {
    LevelWeight w;
    w.kind_ = Kind::kPower;
    w.exponent_ = a;
    return w;
  }

  static LevelWeight table(std::vector<double> logk_values) {
    if (logk_values.empty())
      throw std::invalid_argument("table weight needs at least one level value");
    LevelWeight w;
    w.kind_ = Kind::kTable;
    w.values_ = std::move(logk_values);
    return w;
  }

  Kind kind() const { return kind_; }
  bool is_power() const { return kind_ == Kind::kPower; }
  const Rational& exponent() const { return exponent_; }
  const std::vector<double>& table_values() const { return values_; }

  double logk_at(long long j) const {
    if (j < 0) throw std::invalid_argument("negative level");
    if (kind_ == Kind::kPower)
      return exponent_.to_double() * static_cast<double>(j);
    const long long n = static_cast<long long>(values_.size());
    if (j < n) return values_[static_cast<std::size_t>(j)];
    return values_.back() + tail_slope_logk() * static_cast<double>(j - (n - 1));
  }

  // log_k φ(j+1) - log_k φ(j) for j past any table; governs decay certificates.
  double tail_slope_logk() const {
    if (kind_ == Kind::kPower) return exponent_.to_double();
    if (values_.size() < 2) return 0.0;  // single-entry table: constant tail
    return values_[values_.size() - 1] - values_[values_.size() - 2];
  }

  // σ_p = w^{-1/(p-1)}; exact on power weights.
  LevelWeight dual(const Rational& p) const {
    if (!(Rational(1) < p))
      throw std::invalid_argument("dual weight requires p > 1");
    const Rational scale = Rational(-1) / (p - Rational(1));
    if (kind_ == Kind::kPower) return power(exponent_ * scale);
    std::vector<double> v = values_;
    for (double& e : v) e *= scale.to_double();
    return table(std::move(v));
  }

  std::string descriptor() const {
    if (kind_ == Kind::kPower) return "power:a=" + rational_text(exponent_);
    std::ostringstream os;
    os << "table:[";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) os << ",";
      os << values_[i];
    }
    os << "]";
    return os.str();
  }

 private:
  static std::string rational_text(const Rational& r) {
    if (r.is_integer()) return std::to_string(r.num());
    // Exact decimal when the denominator divides a power of ten, else n/d.
    long long d = r.den();
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return r.str();
    const int digits = twos > fives ? twos : fives;
    long long scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    long long units = r.num() * (scale / r.den());
    std::string sign = units < 0 ? "-" : "";
    if (units < 0) units = -units;
    std::string body = std::to_string(units);
    while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
    body.insert(body.end() - digits, '.');
    return sign + body;
  }

  Kind kind_ = Kind::kPower;
  Rational exponent_ = 0;
  std::vector<double> values_;
};

// Descriptor grammar: "power:a=<rational decimal>" or "table:[v0,v1,...]"
// with log_k level values.
inline LevelWeight parse_level_weight(std::string_view s) {
  if (s.rfind("power:a=", 0) == 0)
    return LevelWeight::power(Rational::parse(s.substr(8)));
  if (s.rfind("table:[", 0) == 0 && !s.empty() && s.back() == ']') {
    std::string body(s.substr(7, s.size() - 8));
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t next = body.find(',', pos);
      if (next == std::string::npos) next = body.size();
      const std::string tok = body.substr(pos, next - pos);
      if (tok.empty()) throw std::invalid_argument("empty table entry in weight descriptor");
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument("bad table entry in weight descriptor: " + tok);
      vals.push_back(v);
      if (next == body.size()) break;
      pos = next + 1;
    }
    return LevelWeight::table(std::move(vals));
  }
  throw std::invalid_argument("unrecognized weight descriptor: " + std::string(s));
}

// w(T_j) = |T_j| φ(j) = k^j φ(j).
inline double level_mass_logk(const TreeParams& t, const LevelWeight& w, long long j) {
  (void)t;
  return static_cast<double>(j) + w.logk_at(j);
}

// w(S(x,r)) for any x of depth j, summed over the level slices of the sphere.
inline double sphere_weight_logk(const TreeParams& t, const LevelWeight& w, long long j,
                                 long long r) {
  LogkSum sum(t.k);
  for (long long m = 0; m <= std::min(j, r); ++m)
    sum.add(sphere_level_count_logk(t, j, r, m) + w.logk_at(j + r - 2 * m));
  return sum.value_logk();
}

inline double ball_weight_logk(const TreeParams& t, const LevelWeight& w, long long j,
                               long long r) {
  LogkSum sum(t.k);
  for (long long s = 0; s <= r; ++s) sum.add(sphere_weight_logk(t, w, j, s));
  return sum.value_logk();
}

// A level weight with finitely many per-vertex overrides inside a declared
// truncation depth.
class Weight {
 public:
  Weight(LevelWeight base) : base_(std::move(base)) {}  // NOLINT: implicit by design
  Weight(LevelWeight base, std::map<Vertex, double> overrides, long long truncation_depth)
      : base_(std::move(base)), overrides_(std::move(overrides)) {
    for (const auto& [v, val] : overrides_) {
      if (val <= 0) throw std::invalid_argument("weight overrides must be positive");
      if (v.depth() > truncation_depth)
        throw std::invalid_argument("weight override outside the declared truncation");
    }
  }

  const LevelWeight& base() const { return base_; }
  bool has_overrides() const { return !overrides_.empty(); }

  double logk_at(const TreeParams& t, const Vertex& v) const {
    auto it = overrides_.find(v);
    if (it != overrides_.end()) return logk_from_linear(t.k, it->second);
    return base_.logk_at(v.depth());
  }

  double linear_at(const TreeParams& t, const Vertex& v) const {
    auto it = overrides_.find(v);
    if (it != overrides_.end()) return it->second;
    return linear_from_logk(t.k, base_.logk_at(v.depth()));
  }

 private:
  LevelWeight base_;
  std::map<Vertex, double> overrides_;
};

struct WeightPair {
  Weight u;
  Weight v;
};

inline double set_weight(const TreeParams& t, const Weight& w, std::span<const Vertex> set) {
  double total = 0.0;
  for (const Vertex& v : set) total += w.linear_at(t, v);
  return total;
}

}  // namespace treemax
