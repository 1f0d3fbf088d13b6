#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "treemax/functions.hpp"
#include "treemax/logk.hpp"
#include "treemax/tree.hpp"
#include "treemax/weights.hpp"

namespace treemax {

struct MaxResult {
  double value = 0.0;
  long long radius = 0;  // smallest radius attaining the supremum
};

// Spherical average of a level function at any vertex of the given depth.
// Counts are carried as cnt/k^r so magnitudes stay bounded; numerator and
// denominator run through the same loop, which keeps A_r(1) == 1 bit-exact.
inline double sphere_average(const TreeParams& t, const LevelFunction& g, long long depth,
                             long long r) {
  if (depth < 0 || r < 0) throw std::invalid_argument("negative average parameter");
  const long long m_max = std::min(depth, r);
  const double k = static_cast<double>(t.k);
  double num = 0.0, den = 0.0;
  double c = 1.0;  // cnt(j, r, m) / k^r, updated incrementally in m
  for (long long m = 0; m <= m_max; ++m) {
    if (m > 0) {
      c = (m == 1) ? (k - 1.0) / (k * k) : c / k;
      if (m == r) c = std::pow(k, -static_cast<double>(r));  // the single ancestor
    }
    den += c;
    const double gi = g.at(depth + r - 2 * m);
    if (gi != 0.0) num += c * gi;
  }
  return num / den;
}

namespace detail {

// f-mass at each distance from x, indexed 0..depth(x)+max_depth(f).
inline std::vector<double> mass_by_distance(const SparseFunction& f, const Vertex& x) {
  std::vector<double> bucket(static_cast<std::size_t>(x.depth() + f.max_depth()) + 1, 0.0);
  for (const auto& [v, val] : f.support())
    bucket[static_cast<std::size_t>(distance(x, v))] += val;
  return bucket;
}

inline double sphere_size_linear(const TreeParams& t, long long j, long long r) {
  return std::pow(static_cast<double>(t.k), static_cast<double>(r)) *
         sphere_size_scaled(t, j, r);
}

}  // namespace detail

inline double sphere_average(const TreeParams& t, const SparseFunction& f, const Vertex& x,
                             long long r) {
  double num = 0.0;
  for (const auto& [v, val] : f.support())
    if (distance(x, v) == r) num += val;
  return num / detail::sphere_size_linear(t, x.depth(), r);
}

inline double ball_average(const TreeParams& t, const LevelFunction& g, long long depth,
                           long long r) {
  // Running sums scaled by k^{s-r}: N_r = N_{r-1}/k + num_r.
  const double k = static_cast<double>(t.k);
  double num = 0.0, den = 0.0;
  for (long long s = 0; s <= r; ++s) {
    num /= k;
    den /= k;
    const long long m_max = std::min(depth, s);
    double c = 1.0;
    for (long long m = 0; m <= m_max; ++m) {
      if (m > 0) {
        c = (m == 1) ? (k - 1.0) / (k * k) : c / k;
        if (m == s) c = std::pow(k, -static_cast<double>(s));
      }
      den += c;
      const double gi = g.at(depth + s - 2 * m);
      if (gi != 0.0) num += c * gi;
    }
  }
  return num / den;
}

inline double ball_average(const TreeParams& t, const SparseFunction& f, const Vertex& x,
                           long long r) {
  const std::vector<double> bucket = detail::mass_by_distance(f, x);
  double num = 0.0;
  for (long long s = 0; s <= r && s < static_cast<long long>(bucket.size()); ++s)
    num += bucket[static_cast<std::size_t>(s)];
  return num / (std::pow(static_cast<double>(t.k), static_cast<double>(r)) *
                ball_size_scaled(t, x.depth(), r));
}

// M° at any vertex of the given depth. The supremum over radii is exact: the
// sphere misses the support entirely once |depth - r| exceeds the top support
// level, so only r in [depth - J, depth + J] can contribute.
inline MaxResult maximal_sphere(const TreeParams& t, const LevelFunction& g,
                                long long depth) {
  const long long top = g.max_level();
  if (top < 0) return {0.0, 0};
  MaxResult best{-1.0, 0};
  for (long long r = std::max<long long>(0, depth - top); r <= depth + top; ++r) {
    const double v = sphere_average(t, g, depth, r);
    if (v > best.value) best = {v, r};
  }
  if (best.value <= 0.0) return {0.0, 0};
  return best;
}

inline MaxResult maximal_sphere(const TreeParams& t, const SparseFunction& f,
                                const Vertex& x) {
  if (f.empty()) return {0.0, 0};
  const std::vector<double> bucket = detail::mass_by_distance(f, x);
  MaxResult best{-1.0, 0};
  for (long long r = 0; r < static_cast<long long>(bucket.size()); ++r) {
    const double v = bucket[static_cast<std::size_t>(r)] /
                     detail::sphere_size_linear(t, x.depth(), r);
    if (v > best.value) best = {v, r};
  }
  if (best.value <= 0.0) return {0.0, 0};
  return best;
}

inline MaxResult maximal_ball(const TreeParams& t, const LevelFunction& g, long long depth) {
  const long long top = g.max_level();
  if (top < 0) return {0.0, 0};
  MaxResult best{-1.0, 0};
  for (long long r = 0; r <= depth + top; ++r) {
    const double v = ball_average(t, g, depth, r);
    if (v > best.value) best = {v, r};
  }
  if (best.value <= 0.0) return {0.0, 0};
  return best;
}

inline MaxResult maximal_ball(const TreeParams& t, const SparseFunction& f, const Vertex& x) {
  if (f.empty()) return {0.0, 0};
  const std::vector<double> bucket = detail::mass_by_distance(f, x);
  const double k = static_cast<double>(t.k);
  MaxResult best{-1.0, 0};
  double num = 0.0, den = 0.0;
  for (long long r = 0; r < static_cast<long long>(bucket.size()); ++r) {
    num = num / k + bucket[static_cast<std::size_t>(r)] *
                        std::pow(k, -static_cast<double>(r));
    den = den / k + sphere_size_scaled(t, x.depth(), r);
    const double v = num / den;
    if (v > best.value) best = {v, r};
  }
  if (best.value <= 0.0) return {0.0, 0};
  return best;
}

// M° of a level function is again a level function; evaluate it per depth.
inline LevelFunction maximal_level_profile(const TreeParams& t, const LevelFunction& g,
                                           long long j_max) {
  std::vector<double> out(static_cast<std::size_t>(j_max) + 1, 0.0);
  for (long long j = 0; j <= j_max; ++j)
    out[static_cast<std::size_t>(j)] = maximal_sphere(t, g, j).value;
  return LevelFunction(std::move(out));
}

// P_r f(x) = Σ_{d(x,y)=r} f(y); the self-adjoint kernel behind A_r°.
inline double pair_sum(const SparseFunction& f, const Vertex& x, long long r) {
  double total = 0.0;
  for (const auto& [v, val] : f.support())
    if (distance(x, v) == r) total += val;
  return total;
}

inline double lp_norm_logk(const TreeParams& t, const LevelFunction& g, const LevelWeight& w,
                           double p) {
  LogkSum sum(t.k);
  for (long long j = 0; j <= g.max_level(); ++j) {
    const double gj = g.at(j);
    if (gj == 0.0) continue;
    sum.add(p * logk_from_linear(t.k, gj) + level_mass_logk(t, w, j));
  }
  return sum.value_logk() == kLogZero ? kLogZero : sum.value_logk() / p;
}

inline double lp_norm_logk(const TreeParams& t, const SparseFunction& f, const Weight& w,
                           double p) {
  LogkSum sum(t.k);
  for (const auto& [v, val] : f.support())
    sum.add(p * logk_from_linear(t.k, val) + w.logk_at(t, v));
  return sum.value_logk() == kLogZero ? kLogZero : sum.value_logk() / p;
}

// log_k Σ_i g(i) k^i. Every spherical average obeys A_r°f(x) <= k^{S1 - depth(x)}
// (counts obey cnt/|S| <= k^{i-j}), which certifies the deep-level tails of the
// superlevel scans below.
inline double support_mass_logk(const TreeParams& t, const LevelFunction& g) {
  LogkSum sum(t.k);
  for (long long i = 0; i <= g.max_level(); ++i) {
    const double gi = g.at(i);
    if (gi != 0.0) sum.add(logk_from_linear(t.k, gi) + static_cast<double>(i));
  }
  return sum.value_logk();
}

struct WeakOptions {
  long long level_horizon = 500;
  int points_per_doubling = 64;  // λ-grid resolution per factor of 2
  int hard_cap_factor = 4;       // certified scan may extend this far past the horizon
};

struct WeakTypeProfile {
  std::vector<double> lambdas;      // decreasing thresholds (linear)
  std::vector<double> masses_logk;  // w({M°f > λ}) per threshold
  double sup_logk = kLogZero;       // sup_λ λ · w({M°f > λ})^{1/p}
  double sup_lambda = 0.0;
  bool diverged = false;  // certificate failed to close within the hard cap
  long long levels_scanned = 0;
};

// Superlevel masses of M°f against a level weight. Levels are scanned until
// the certified bound k^{S1-j} drops below the smallest threshold; running past
// the hard cap flags divergence instead of silently truncating.
inline WeakTypeProfile weak_profile(const TreeParams& t, const LevelFunction& g,
                                    const LevelWeight& w, double p,
                                    const WeakOptions& opts = {}) {
  WeakTypeProfile out;
  if (g.max_level() < 0) return out;
  const double s1 = support_mass_logk(t, g);

  std::vector<double> profile;
  profile.reserve(static_cast<std::size_t>(opts.level_horizon));
  for (long long j = 0; j < opts.level_horizon; ++j)
    profile.push_back(maximal_sphere(t, g, j).value);

  double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
  for (double v : profile) {
    if (v > vmax) vmax = v;
    if (v > 0.0 && v < vmin) vmin = v;
  }
  if (vmax == 0.0) return out;

  // Extend until the tail certificate clears the smallest threshold.
  const double vmin_logk = logk_from_linear(t.k, vmin);
  long long scan_to = static_cast<long long>(std::floor(s1 - vmin_logk)) + 2;
  const long long cap = opts.level_horizon * opts.hard_cap_factor;
  if (scan_to > cap) {
    out.diverged = true;
    scan_to = cap;
  }
  for (long long j = opts.level_horizon; j < scan_to; ++j)
    profile.push_back(maximal_sphere(t, g, j).value);
  out.levels_scanned = static_cast<long long>(profile.size());

  // Sorted superlevel prefix masses.
  std::vector<std::pair<double, double>> cells;  // (value, level mass logk)
  for (long long j = 0; j < static_cast<long long>(profile.size()); ++j)
    if (profile[static_cast<std::size_t>(j)] > 0.0)
      cells.emplace_back(profile[static_cast<std::size_t>(j)], level_mass_logk(t, w, j));
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> prefix_logk(cells.size());
  double acc = kLogZero;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    acc = logk_add(t.k, acc, cells[i].second);
    prefix_logk[i] = acc;
  }

  const long long steps = static_cast<long long>(
      std::ceil(std::log2(vmax / vmin) * opts.points_per_doubling));
  for (long long s = 0; s <= steps; ++s) {
    const double lambda =
        s == steps ? vmin
                   : vmax * std::exp2(-static_cast<double>(s) / opts.points_per_doubling);
    // mass of {value > lambda}
    std::size_t lo = 0, hi = cells.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cells[mid].first > lambda)
        lo = mid + 1;
      else
        hi = mid;
    }
    const double mass = lo == 0 ? kLogZero : prefix_logk[lo - 1];
    out.lambdas.push_back(lambda);
    out.masses_logk.push_back(mass);
    if (mass != kLogZero) {
      const double functional = logk_from_linear(t.k, lambda) + mass / p;
      if (functional > out.sup_logk) {
        out.sup_logk = functional;
        out.sup_lambda = lambda;
      }
    }
  }
  return out;
}

struct SeriesOptions {
  long long tail_window = 10;  // radii making up the "last decade" of the sum
  double tail_ratio = 0.01;
};

struct SeriesSum {
  std::vector<double> term_logk;     // ||A_r° f||_{L^p(w)} per radius
  std::vector<double> partial_logk;  // running sums
  bool certified_decay = false;
  bool converged = false;
  double tail_increment = 0.0;  // (S_R - S_{R-window}) / S_R
};

// Partial sums of Σ_r ||A_r° f||_{L^p(w)}. Each term is a finite level sum:
// the sphere at depth j only reaches the support when |j - r| <= top level.
inline SeriesSum series_norm_sum(const TreeParams& t, const LevelFunction& g,
                                 const LevelWeight& w, double p, long long r_max,
                                 const SeriesOptions& opts = {}) {
  SeriesSum out;
  const long long top = g.max_level();
  if (top < 0) {
    out.term_logk.assign(static_cast<std::size_t>(r_max) + 1, kLogZero);
    out.partial_logk.assign(static_cast<std::size_t>(r_max) + 1, kLogZero);
    out.certified_decay = true;
    out.converged = true;
    return out;
  }
  // ||A_r° f|| <= k^{S1 + (r-top)(1+slope-p)/p + O(1)}; decay needs 1+slope < p.
  out.certified_decay = 1.0 + w.tail_slope_logk() - p < 0.0;

  LogkSum acc(t.k);
  for (long long r = 0; r <= r_max; ++r) {
    LogkSum norm_p(t.k);
    for (long long j = std::max<long long>(0, r - top); j <= r + top; ++j) {
      const double a = sphere_average(t, g, j, r);
      if (a > 0.0) norm_p.add(p * logk_from_linear(t.k, a) + level_mass_logk(t, w, j));
    }
    const double term =
        norm_p.value_logk() == kLogZero ? kLogZero : norm_p.value_logk() / p;
    out.term_logk.push_back(term);
    acc.add(term);
    out.partial_logk.push_back(acc.value_logk());
  }
  if (r_max >= opts.tail_window) {
    const double s_r = out.partial_logk.back();
    const double s_prev =
        out.partial_logk[static_cast<std::size_t>(r_max - opts.tail_window)];
    out.tail_increment =
        s_r == kLogZero ? 0.0 : 1.0 - linear_from_logk(t.k, s_prev - s_r);
    out.converged = out.certified_decay && out.tail_increment < opts.tail_ratio;
  }
  return out;
}

}  // namespace treemax
