#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace treemax {

// All bulk quantities (masses, norms, condition ratios) are carried as
// log-base-k exponents; k^{pj} overflows doubles long before the grids end.
// Zero is encoded as -infinity, matching the usual log-domain convention.

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double ln_k(int k) { return std::log(static_cast<double>(k)); }

inline double logk_from_linear(int k, double v) {
  if (v < 0) throw std::invalid_argument("log-domain value must be nonnegative");
  if (v == 0) return kLogZero;
  return std::log(v) / ln_k(k);
}

inline double linear_from_logk(int k, double e) {
  if (e == kLogZero) return 0.0;
  return std::pow(static_cast<double>(k), e);
}

// log_k(k^a + k^b), max-shifted.
inline double logk_add(int k, double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp((lo - hi) * ln_k(k))) / ln_k(k);
}

// Streaming max-shifted sum of log_k terms.
class LogkSum {
 public:
  explicit LogkSum(int k) : lnk_(ln_k(k)) {}

  void add(double e_logk) {
    if (e_logk == kLogZero) return;
    if (max_ == kLogZero) {
      max_ = e_logk;
      acc_ = 1.0;
    } else if (e_logk <= max_) {
      acc_ += std::exp((e_logk - max_) * lnk_);
    } else {
      acc_ = acc_ * std::exp((max_ - e_logk) * lnk_) + 1.0;
      max_ = e_logk;
    }
    ++terms_;
  }

  double value_logk() const {
    if (max_ == kLogZero) return kLogZero;
    return max_ + std::log(acc_) / lnk_;
  }

  std::size_t terms() const { return terms_; }

 private:
  double lnk_;
  double max_ = kLogZero;
  double acc_ = 0.0;
  std::size_t terms_ = 0;
};

// base^exp in exact 64-bit arithmetic; throws instead of wrapping.
inline std::uint64_t ipow_u64(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  while (exp > 0) {
    if (exp & 1u) {
      if (base != 0 && result > UINT64_MAX / base)
        throw std::overflow_error("integer power overflow");
      result *= base;
    }
    exp >>= 1;
    if (exp == 0) break;
    if (base != 0 && base > UINT64_MAX / base)
      throw std::overflow_error("integer power overflow");
    base *= base;
  }
  return result;
}

inline std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b) throw std::overflow_error("integer sum overflow");
  return a + b;
}

}  // namespace treemax
