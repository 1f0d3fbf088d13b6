#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treemax/logk.hpp"

namespace treemax {

struct TreeParams {
  int k;

  explicit TreeParams(int branching) : k(branching) {
    if (k < 2) throw std::invalid_argument("branching factor k must be at least 2");
  }
};

// A vertex of the infinite rooted k-ary tree, addressed by its root path.
// The root is the empty path; depth equals the path length. Path digits keep
// vertices exact at any depth, where a flat integer index would overflow.
class Vertex {
 public:
  Vertex() = default;  // root
  explicit Vertex(std::vector<std::uint8_t> path) : path_(std::move(path)) {}
  Vertex(std::initializer_list<int> digits) {
    path_.reserve(digits.size());
    for (int d : digits) {
      if (d < 0 || d > 255) throw std::invalid_argument("path digit out of range");
      path_.push_back(static_cast<std::uint8_t>(d));
    }
  }

  long long depth() const { return static_cast<long long>(path_.size()); }
  const std::vector<std::uint8_t>& path() const { return path_; }
  bool is_root() const { return path_.empty(); }

  Vertex parent() const {
    if (is_root()) throw std::invalid_argument("the root has no parent");
    return Vertex(std::vector<std::uint8_t>(path_.begin(), path_.end() - 1));
  }

  Vertex child(int c) const {
    std::vector<std::uint8_t> p = path_;
    p.push_back(static_cast<std::uint8_t>(c));
    return Vertex(std::move(p));
  }

  Vertex ancestor(long long steps) const {
    if (steps < 0 || steps > depth())
      throw std::invalid_argument("ancestor steps out of range");
    return Vertex(std::vector<std::uint8_t>(path_.begin(), path_.end() - steps));
  }

  void validate(const TreeParams& t) const {
    for (std::uint8_t d : path_)
      if (d >= t.k) throw std::invalid_argument("path digit exceeds branching factor");
  }

  friend bool operator==(const Vertex& a, const Vertex& b) { return a.path_ == b.path_; }
  friend auto operator<=>(const Vertex& a, const Vertex& b) { return a.path_ <=> b.path_; }

 private:
  std::vector<std::uint8_t> path_;
};

// Edge-count metric: depths minus twice the depth of the common prefix.
inline long long distance(const Vertex& x, const Vertex& y) {
  const auto& a = x.path();
  const auto& b = y.path();
  std::size_t c = 0;
  const std::size_t n = std::min(a.size(), b.size());
  while (c < n && a[c] == b[c]) ++c;
  return static_cast<long long>(a.size() - c) + static_cast<long long>(b.size() - c);
}

// One level slice of a sphere: vertices of T_i at distance r from a vertex of
// depth j, meeting it after m upward steps, so i = j + r - 2m and |i-j| <= r.
struct SphereLevelSlice {
  long long center_depth;  // j
  long long radius;        // r
  long long up_steps;      // m
  long long target_depth;  // i

  static SphereLevelSlice make(long long j, long long r, long long m) {
    if (j < 0 || r < 0 || m < 0) throw std::invalid_argument("negative slice parameter");
    return SphereLevelSlice{j, r, m, j + r - 2 * m};
  }

  // Feasible (j, i, r) combinations have i >= 0, |i-j| <= r and matching parity.
  static std::optional<SphereLevelSlice> from_levels(long long j, long long i, long long r) {
    if (j < 0 || i < 0 || r < 0) return std::nullopt;
    const long long twice_m = j + r - i;
    if (twice_m < 0 || twice_m % 2 != 0) return std::nullopt;
    const long long m = twice_m / 2;
    if (m > r) return std::nullopt;
    return SphereLevelSlice{j, r, m, i};
  }
};

// |T_{j+r-2m} ∩ S(x,r)| for any x of depth j. Meeting the path after m upward
// steps leaves r-m downward steps whose first move must avoid the branch back
// toward x, hence the (k-1) factor in the middle case.
inline std::uint64_t sphere_level_count(const TreeParams& t, long long j, long long r,
                                        long long m) {
  if (j < 0 || r < 0 || m < 0) throw std::invalid_argument("negative sphere parameter");
  if (m > std::min(r, j)) return 0;
  const std::uint64_t k = static_cast<std::uint64_t>(t.k);
  if (m == 0) return ipow_u64(k, static_cast<std::uint64_t>(r));
  if (m == r) return 1;  // the r-th ancestor itself
  return (k - 1) * ipow_u64(k, static_cast<std::uint64_t>(r - m - 1));
}

// log_k of the same count; kLogZero for infeasible m. Exact for the m = 0 and
// m = r branches, whose counts are pure powers of k.
inline double sphere_level_count_logk(const TreeParams& t, long long j, long long r,
                                      long long m) {
  if (j < 0 || r < 0 || m < 0) throw std::invalid_argument("negative sphere parameter");
  if (m > std::min(r, j)) return kLogZero;
  if (m == 0) return static_cast<double>(r);
  if (m == r) return 0.0;
  return logk_from_linear(t.k, static_cast<double>(t.k - 1)) +
         static_cast<double>(r - m - 1);
}

// cnt(j, r, m) / k^r; magnitudes stay in [k^-r, 1] so level sums never overflow.
inline double sphere_level_count_scaled(const TreeParams& t, long long j, long long r,
                                        long long m) {
  if (m > std::min(r, j) || m < 0) return 0.0;
  const double k = static_cast<double>(t.k);
  if (m == 0) return 1.0;
  if (m == r) return std::pow(k, -static_cast<double>(r));
  return (k - 1.0) * std::pow(k, -static_cast<double>(m + 1));
}

// |S(x,r)| for x of depth j: k^r + k^{r-1}, minus k^{r-j-1} when the sphere
// wraps past the root (j < r).
inline std::uint64_t sphere_size(const TreeParams& t, long long j, long long r) {
  if (j < 0 || r < 0) throw std::invalid_argument("negative sphere parameter");
  if (r == 0) return 1;
  const std::uint64_t k = static_cast<std::uint64_t>(t.k);
  std::uint64_t s = checked_add_u64(ipow_u64(k, static_cast<std::uint64_t>(r)),
                                    ipow_u64(k, static_cast<std::uint64_t>(r - 1)));
  if (j < r) s -= ipow_u64(k, static_cast<std::uint64_t>(r - j - 1));
  return s;
}

// |S(x,r)| / k^r; lies in [1, 1 + 1/k] and is r-independent for r >= 1.
inline double sphere_size_scaled(const TreeParams& t, long long j, long long r) {
  if (r == 0) return 1.0;
  const double k = static_cast<double>(t.k);
  double s = 1.0 + 1.0 / k;
  if (j < r) s -= std::pow(k, -static_cast<double>(j + 1));
  return s;
}

inline double sphere_size_logk(const TreeParams& t, long long j, long long r) {
  return static_cast<double>(r) + logk_from_linear(t.k, sphere_size_scaled(t, j, r));
}

inline std::uint64_t ball_size(const TreeParams& t, long long j, long long r) {
  std::uint64_t total = 0;
  for (long long s = 0; s <= r; ++s) total = checked_add_u64(total, sphere_size(t, j, s));
  return total;
}

// |B(x,r)| / k^r.
inline double ball_size_scaled(const TreeParams& t, long long j, long long r) {
  double total = 0.0;
  for (long long s = 0; s <= r; ++s)
    total += sphere_size_scaled(t, j, s) * std::pow(static_cast<double>(t.k),
                                                    static_cast<double>(s - r));
  return total;
}

inline double ball_size_logk(const TreeParams& t, long long j, long long r) {
  return static_cast<double>(r) + logk_from_linear(t.k, ball_size_scaled(t, j, r));
}

}  // namespace treemax
