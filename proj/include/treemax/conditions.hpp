#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "treemax/functions.hpp"
#include "treemax/logk.hpp"
#include "treemax/operators.hpp"
#include "treemax/rng.hpp"
#include "treemax/tree.hpp"
#include "treemax/truncated_tree.hpp"
#include "treemax/weights.hpp"

namespace treemax {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Exponent tuple shared by the weight-condition checkers. Unused fields stay
// NaN; each checker validates what it consumes.
struct ConditionParams {
  double p = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::quiet_NaN();

  void require_pair_condition(bool strict_admissible = false) const {
    require(p > 1.0, "admissibility requires p > 1");
    require(beta > 0.0 && beta < 1.0, "admissibility requires 0 < beta < 1");
    require(alpha > 0.0 && alpha < p, "admissibility requires 0 < alpha < p");
    if (strict_admissible)
      require(beta <= alpha, "admissibility requires beta <= alpha");
  }

  void require_levelwise() const {
    require(p > 1.0, "admissibility requires p > 1");
    require(delta < 1.0, "admissibility requires delta < 1");
  }
};

struct Witness {
  std::string kind = "none";  // level-slice-pair | vertex-sets | level-radius | level | ball
  long long j = -1, i = -1, r = -1, m = -1;
  std::vector<Vertex> e_set, f_set;
  double value_logk = kLogZero;
  std::string note;
};

struct ConditionReport {
  std::string condition;
  std::map<std::string, double> params;
  std::map<std::string, std::string> grid;
  double empirical_sup_logk = kLogZero;
  Witness witness;
  std::string verdict;  // bounded-on-grid | growing | diverged
};

// Compares the running supremum at the end of the scan against its midpoint:
// if the last half of the grid moved it by less than stable_tol it is treated
// as bounded on this grid, otherwise as growing.
inline std::string classify_running_sup_logk(int k, const std::vector<double>& running,
                                             double stable_tol = 0.01) {
  if (running.empty() || running.back() == kLogZero) return "bounded-on-grid";
  const double half = running[running.size() / 2];
  const double gained =
      half == kLogZero ? 1.0 : 1.0 - linear_from_logk(k, half - running.back());
  return gained < stable_tol ? "bounded-on-grid" : "growing";
}

namespace detail {

// Visits the grid cells with max(j, r) == scale, so sups can be tracked on
// expanding squares.
template <typename F>
void for_each_frontier(long long scale, long long j_max, long long r_max, F&& visit) {
  if (scale <= r_max)
    for (long long j = 0; j <= std::min(scale, j_max); ++j) visit(j, scale);
  if (scale <= j_max)
    for (long long r = 0; r <= std::min(scale - 1, r_max); ++r) visit(scale, r);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pair measure 1⊗u({(x,y) in E x F : d(x,y) = r})
// ---------------------------------------------------------------------------

inline double pair_measure_logk(const TreeParams& t, const Weight& u,
                                std::span<const Vertex> e_set, std::span<const Vertex> f_set,
                                long long r) {
  LogkSum sum(t.k);
  for (const Vertex& x : e_set)
    for (const Vertex& y : f_set)
      if (distance(x, y) == r) sum.add(u.logk_at(t, y));
  return sum.value_logk();
}

// Fast path for full level slices E = T_j, F = T_i: every x in T_j sees the
// same count cnt(j, r, m) of partners in T_i.
inline double pair_measure_slices_logk(const TreeParams& t, const LevelWeight& u, long long j,
                                       long long i, long long r) {
  const auto slice = SphereLevelSlice::from_levels(j, i, r);
  if (!slice) return kLogZero;
  const double cnt = sphere_level_count_logk(t, j, r, slice->up_steps);
  if (cnt == kLogZero) return kLogZero;
  return static_cast<double>(j) + cnt + u.logk_at(i);
}

// ---------------------------------------------------------------------------
// Pair-measure condition ratio against k^{rβ} v(E)^{α/p} u(F)^{1-α/p}
// ---------------------------------------------------------------------------

inline double suffcond_denominator_logk(long long r, double ve_logk, double uf_logk,
                                        const ConditionParams& cp) {
  return static_cast<double>(r) * cp.beta + (cp.alpha / cp.p) * ve_logk +
         (1.0 - cp.alpha / cp.p) * uf_logk;
}

inline double suffcond_ratio_logk(const TreeParams& t, const Weight& u, const Weight& v,
                                  std::span<const Vertex> e_set,
                                  std::span<const Vertex> f_set, long long r,
                                  const ConditionParams& cp) {
  cp.require_pair_condition();
  require(!e_set.empty() && !f_set.empty(), "condition ratio needs nonempty E and F");
  LogkSum ve(t.k), uf(t.k);
  for (const Vertex& x : e_set) ve.add(v.logk_at(t, x));
  for (const Vertex& y : f_set) uf.add(u.logk_at(t, y));
  const double pm = pair_measure_logk(t, u, e_set, f_set, r);
  return pm - suffcond_denominator_logk(r, ve.value_logk(), uf.value_logk(), cp);
}

inline double suffcond_ratio_slices_logk(const TreeParams& t, const LevelWeight& u,
                                         const LevelWeight& v, long long j, long long i,
                                         long long r, const ConditionParams& cp) {
  cp.require_pair_condition();
  const double pm = pair_measure_slices_logk(t, u, j, i, r);
  if (pm == kLogZero) return kLogZero;
  return pm - suffcond_denominator_logk(r, level_mass_logk(t, v, j),
                                        level_mass_logk(t, u, i), cp);
}

// Best slice-pair ratio per radius over full levels E = T_j, F = T_i; the
// grid the closed-form checkers sweep.
inline std::vector<double> suffcond_slice_sup_by_r(const TreeParams& t, const LevelWeight& u,
                                                   const LevelWeight& v,
                                                   const ConditionParams& cp, long long j_max,
                                                   long long r_max, Witness* best = nullptr) {
  cp.require_pair_condition();
  std::vector<double> sup_by_r(static_cast<std::size_t>(r_max) + 1, kLogZero);
  double sup = kLogZero;
  for (long long r = 0; r <= r_max; ++r) {
    for (long long j = 0; j <= j_max; ++j) {
      for (long long m = 0; m <= std::min(j, r); ++m) {
        const long long i = j + r - 2 * m;
        const double ratio = suffcond_ratio_slices_logk(t, u, v, j, i, r, cp);
        if (ratio > sup_by_r[static_cast<std::size_t>(r)])
          sup_by_r[static_cast<std::size_t>(r)] = ratio;
        if (best && ratio > sup) {
          sup = ratio;
          *best = {"level-slice-pair", j, i, r, m, {}, {}, ratio, ""};
        }
      }
    }
  }
  return sup_by_r;
}

inline ConditionReport suffcond_slice_report(const TreeParams& t, const LevelWeight& u,
                                             const LevelWeight& v, const ConditionParams& cp,
                                             long long j_max, long long r_max) {
  ConditionReport report;
  report.condition = "pair-measure-condition-slices";
  report.params = {{"p", cp.p}, {"beta", cp.beta}, {"alpha", cp.alpha},
                   {"k", static_cast<double>(t.k)},
                   {"j_max", static_cast<double>(j_max)},
                   {"r_max", static_cast<double>(r_max)}};
  report.grid["family"] = "full-level-slices";
  const std::vector<double> sup_by_r =
      suffcond_slice_sup_by_r(t, u, v, cp, j_max, r_max, &report.witness);
  std::vector<double> running;
  double acc = kLogZero;
  for (double value : sup_by_r) {
    if (value > acc) acc = value;
    running.push_back(acc);
  }
  report.empirical_sup_logk = acc;
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

// ---------------------------------------------------------------------------
// Extremal search for the best pair-condition constant
// ---------------------------------------------------------------------------

struct SearchBudget {
  long long max_evaluations = 20000;
  int depth_limit = 6;
  std::size_t node_budget = TruncatedTree::kDefaultNodeBudget;
  int greedy_candidates = 48;  // vertices sampled per greedy growth step
};

// Searches single vertices, level slices within subtrees, and greedy vertex
// additions, the forms the known extremizers take. Deterministic given the
// seed; the budget caps ratio evaluations.
inline ConditionReport extremal_search(const TreeParams& t, const Weight& u, const Weight& v,
                                       const ConditionParams& cp, const SearchBudget& budget,
                                       std::uint64_t seed) {
  cp.require_pair_condition();
  TruncatedTree tree(t, budget.depth_limit, budget.node_budget);
  Rng rng(seed);

  ConditionReport report;
  report.condition = "pair-measure-condition";
  report.params = {{"p", cp.p}, {"beta", cp.beta}, {"alpha", cp.alpha},
                   {"k", static_cast<double>(t.k)}};
  report.grid["family"] = "singles+subtree-slices+greedy";
  report.grid["depth_limit"] = std::to_string(budget.depth_limit);
  report.grid["seed"] = std::to_string(seed);
  if (!(cp.beta <= cp.alpha)) report.grid["inadmissible_for_theorem"] = "true";

  long long evals = 0;
  double best = kLogZero;
  std::vector<Vertex> best_e, best_f;
  long long best_r = 0;
  std::vector<double> best_per_r(static_cast<std::size_t>(2 * budget.depth_limit) + 1,
                                 kLogZero);

  const auto consider = [&](std::vector<Vertex> e, std::vector<Vertex> f, long long r,
                            double ratio) {
    if (r < static_cast<long long>(best_per_r.size()) &&
        ratio > best_per_r[static_cast<std::size_t>(r)])
      best_per_r[static_cast<std::size_t>(r)] = ratio;
    if (ratio > best) {
      best = ratio;
      best_e = std::move(e);
      best_f = std::move(f);
      best_r = r;
    }
  };

  // Each family gets a third of the budget so none starves the others.
  const long long family_budget = budget.max_evaluations / 3;

  // Single-vertex pairs. Exhaustive while the share lasts.
  const long long n = static_cast<long long>(tree.node_count());
  for (long long xi = 0; xi < n && evals < family_budget; ++xi) {
    const Vertex x = tree.vertex_of(static_cast<std::size_t>(xi));
    for (long long yi = xi; yi < n && evals < family_budget; ++yi) {
      const Vertex y = tree.vertex_of(static_cast<std::size_t>(yi));
      const long long r = distance(x, y);
      ++evals;
      consider({x}, {y}, r,
               suffcond_ratio_logk(t, u, v, std::vector<Vertex>{x}, std::vector<Vertex>{y},
                                   r, cp));
    }
  }

  // Subtree level slices: descendants of a root vertex at a fixed depth.
  std::vector<std::pair<Vertex, int>> slice_specs;
  for (long long idx = 0; idx < n; ++idx) {
    const Vertex root = tree.vertex_of(static_cast<std::size_t>(idx));
    if (root.depth() > 2) continue;  // keep the slice family polynomial
    for (int d = static_cast<int>(root.depth()); d <= budget.depth_limit; ++d)
      slice_specs.emplace_back(root, d);
  }
  const auto slice_vertices = [&](const std::pair<Vertex, int>& spec) {
    // Descendants of the subtree root at depth d occupy a contiguous index
    // range: rank(root) * k^(d - depth) onward within level d.
    std::vector<Vertex> out;
    const std::uint64_t width =
        ipow_u64(static_cast<std::uint64_t>(t.k),
                 static_cast<std::uint64_t>(spec.second - spec.first.depth()));
    std::uint64_t rank = 0;
    for (std::uint8_t digit : spec.first.path())
      rank = rank * static_cast<std::uint64_t>(t.k) + digit;
    const std::uint64_t start = tree.level_offset(spec.second) + rank * width;
    for (std::uint64_t o = 0; o < width; ++o)
      out.push_back(tree.vertex_of(static_cast<std::size_t>(start + o)));
    return out;
  };
  const long long slice_budget = 2 * family_budget;
  for (std::size_t a = 0; a < slice_specs.size() && evals < slice_budget; ++a) {
    const std::vector<Vertex> e = slice_vertices(slice_specs[a]);
    for (std::size_t b = 0; b < slice_specs.size() && evals < slice_budget; ++b) {
      const std::vector<Vertex> f = slice_vertices(slice_specs[b]);
      const long long r_lo = std::llabs(static_cast<long long>(slice_specs[a].second) -
                                        static_cast<long long>(slice_specs[b].second));
      const long long r_hi = slice_specs[a].second + slice_specs[b].second;
      for (long long r = r_lo; r <= r_hi && evals < slice_budget; r += 2) {
        if (pair_measure_logk(t, u, e, f, r) == kLogZero) continue;
        ++evals;
        consider(e, f, r, suffcond_ratio_logk(t, u, v, e, f, r, cp));
      }
    }
  }

  // Greedy growth from the best configuration found so far.
  if (best != kLogZero) {
    bool improved = true;
    while (improved && evals < budget.max_evaluations) {
      improved = false;
      double step_best = best;
      std::vector<Vertex> step_e = best_e, step_f = best_f;
      for (int c = 0; c < budget.greedy_candidates && evals < budget.max_evaluations; ++c) {
        const Vertex cand =
            tree.vertex_of(static_cast<std::size_t>(rng.below(tree.node_count())));
        for (int side = 0; side < 2; ++side) {
          std::vector<Vertex> e = best_e, f = best_f;
          std::vector<Vertex>& target = side == 0 ? e : f;
          bool present = false;
          for (const Vertex& w0 : target) present = present || w0 == cand;
          if (present) continue;
          target.push_back(cand);
          ++evals;
          const double ratio = suffcond_ratio_logk(t, u, v, e, f, best_r, cp);
          if (ratio > step_best) {
            step_best = ratio;
            step_e = e;
            step_f = f;
            improved = true;
          }
          if (evals >= budget.max_evaluations) break;
        }
      }
      if (improved) {
        best = step_best;
        best_e = step_e;
        best_f = step_f;
      }
    }
  }

  report.grid["evaluations"] = std::to_string(evals);
  report.grid["budget_exhausted"] =
      evals >= budget.max_evaluations ? "true" : "false";
  report.empirical_sup_logk = best;
  report.witness.kind = "vertex-sets";
  report.witness.e_set = best_e;
  report.witness.f_set = best_f;
  report.witness.r = best_r;
  report.witness.value_logk = best;
  // Growth shows in the per-radius sups up to the radius attaining the
  // maximum; on a truncation, larger radii are forced into deep levels and
  // their declining ratios would mask the trend.
  std::vector<double> running;
  double acc = kLogZero;
  std::size_t last_rise = 0;
  for (double v_r : best_per_r) {
    if (v_r > acc) {
      acc = v_r;
      last_rise = running.size();
    }
    running.push_back(acc);
  }
  running.resize(last_rise + 1);
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

// ---------------------------------------------------------------------------
// Level-wise condition: u(T_i ∩ S(x,r)) vs k^{((r+i-j)/2)(p-δ)} k^{rδ} v(x)
// ---------------------------------------------------------------------------

inline ConditionReport levelwise_condition_sup(const TreeParams& t, const LevelWeight& u,
                                               const LevelWeight& v, double p, double delta,
                                               long long j_max, long long r_max) {
  require(p > 1.0, "admissibility requires p > 1");
  require(delta < 1.0, "admissibility requires delta < 1");
  ConditionReport report;
  report.condition = "levelwise-condition";
  report.params = {{"p", p}, {"delta", delta}, {"k", static_cast<double>(t.k)},
                   {"j_max", static_cast<double>(j_max)},
                   {"r_max", static_cast<double>(r_max)}};
  std::vector<double> running;
  for (long long scale = 0; scale <= std::max(j_max, r_max); ++scale) {
    detail::for_each_frontier(scale, j_max, r_max, [&](long long j, long long r) {
      for (long long m = 0; m <= std::min(j, r); ++m) {
        const long long i = j + r - 2 * m;
        const double ratio = sphere_level_count_logk(t, j, r, m) + u.logk_at(i) -
                             (static_cast<double>(r - m) * (p - delta) +
                              static_cast<double>(r) * delta) -
                             v.logk_at(j);
        if (ratio > report.empirical_sup_logk) {
          report.empirical_sup_logk = ratio;
          report.witness = {"level-radius", j, i, r, m, {}, {}, ratio, ""};
        }
      }
    });
    running.push_back(report.empirical_sup_logk);
  }
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

inline ConditionReport levelwise_condition_sup(const TreeParams& t, const LevelWeight& w,
                                               double p, double delta, long long j_max,
                                               long long r_max) {
  return levelwise_condition_sup(t, w, w, p, delta, j_max, r_max);
}

// ---------------------------------------------------------------------------
// A_p constant over spheres or balls
// ---------------------------------------------------------------------------

enum class Geometry { kSphere, kBall };

inline double ap_product_logk(const TreeParams& t, const LevelWeight& w,
                              const LevelWeight& sigma, double p, Geometry geometry,
                              long long j, long long r) {
  const double size_logk = geometry == Geometry::kSphere ? sphere_size_logk(t, j, r)
                                                         : ball_size_logk(t, j, r);
  const double w_avg = (geometry == Geometry::kSphere ? sphere_weight_logk(t, w, j, r)
                                                      : ball_weight_logk(t, w, j, r)) -
                       size_logk;
  const double s_avg = (geometry == Geometry::kSphere ? sphere_weight_logk(t, sigma, j, r)
                                                      : ball_weight_logk(t, sigma, j, r)) -
                       size_logk;
  return w_avg + (p - 1.0) * s_avg;
}

inline ConditionReport ap_constant(const TreeParams& t, const LevelWeight& w,
                                   const Rational& p, Geometry geometry, long long j_max,
                                   long long r_max) {
  require(Rational(1) < p, "A_p condition requires p > 1");
  const LevelWeight sigma = w.dual(p);
  const double pd = p.to_double();
  ConditionReport report;
  report.condition = geometry == Geometry::kSphere ? "ap-sphere" : "ap-ball";
  report.params = {{"p", pd}, {"k", static_cast<double>(t.k)},
                   {"j_max", static_cast<double>(j_max)},
                   {"r_max", static_cast<double>(r_max)}};
  std::vector<double> running;
  for (long long scale = 0; scale <= std::max(j_max, r_max); ++scale) {
    detail::for_each_frontier(scale, j_max, r_max, [&](long long j, long long r) {
      const double q_val = ap_product_logk(t, w, sigma, pd, geometry, j, r);
      if (q_val > report.empirical_sup_logk) {
        report.empirical_sup_logk = q_val;
        report.witness = {"level-radius", j, -1, r, -1, {}, {}, q_val, ""};
      }
    });
    running.push_back(report.empirical_sup_logk);
  }
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

// ---------------------------------------------------------------------------
// M_s w ≲ w
// ---------------------------------------------------------------------------

namespace detail {

// max of s·log_k w over levels in [lo, hi], honoring the geometric tail.
inline double level_range_max_logk(const LevelWeight& w, double s, long long lo,
                                   long long hi) {
  double best = kLogZero;
  if (w.is_power()) {
    const double b = w.exponent().to_double() * s;
    return b >= 0 ? b * static_cast<double>(hi) : b * static_cast<double>(lo);
  }
  const long long table_end = static_cast<long long>(w.table_values().size()) - 1;
  for (long long i = lo; i <= std::min(hi, table_end); ++i)
    best = std::max(best, s * w.logk_at(i));
  if (hi > table_end) {
    const long long start = std::max(lo, table_end + 1);
    const double slope = w.tail_slope_logk() * s;
    best = std::max(best, slope >= 0 ? s * w.logk_at(hi) : s * w.logk_at(start));
  }
  return best;
}

// M°(w^s) at depth j, in log_k domain. The scan past r = j stops once the
// reachable-level maximum (an upper bound for any average) falls under the
// running max; decaying tails guarantee it does.
inline std::optional<double> maximal_weight_power_logk(const TreeParams& t,
                                                       const LevelWeight& w, double s,
                                                       long long j, long long r_cap) {
  double best = s * w.logk_at(j);  // r = 0
  for (long long r = 1; r <= r_cap; ++r) {
    LogkSum avg(t.k);
    for (long long m = 0; m <= std::min(j, r); ++m)
      avg.add(sphere_level_count_logk(t, j, r, m) + s * w.logk_at(j + r - 2 * m));
    const double value = avg.value_logk() - sphere_size_logk(t, j, r);
    if (value > best) best = value;
    if (r > j &&
        level_range_max_logk(w, s, std::llabs(j - r), j + r) <= best)
      return best;
  }
  return std::nullopt;  // bound never closed within the cap
}

}  // namespace detail

inline ConditionReport ms_bound(const TreeParams& t, const LevelWeight& w, double s,
                                long long j_max) {
  require(s >= 1.0, "M_s bound requires s >= 1");
  ConditionReport report;
  report.condition = "ms-bound";
  report.params = {{"s", s}, {"k", static_cast<double>(t.k)},
                   {"j_max", static_cast<double>(j_max)}};
  if (w.tail_slope_logk() > 0.0) {
    report.verdict = "diverged";
    report.grid["reason"] = "growing weight: descendant averages are unbounded";
    return report;
  }
  const long long table_len =
      w.is_power() ? 1 : static_cast<long long>(w.table_values().size());
  std::vector<double> running;
  for (long long j = 0; j <= j_max; ++j) {
    const long long r_cap = 4 * j + 4 * table_len + 64;
    const auto profile = detail::maximal_weight_power_logk(t, w, s, j, r_cap);
    if (!profile) {
      report.verdict = "diverged";
      report.grid["reason"] = "decay certificate did not close at level " + std::to_string(j);
      return report;
    }
    const double ratio = *profile / s - w.logk_at(j);
    if (ratio > report.empirical_sup_logk) {
      report.empirical_sup_logk = ratio;
      report.witness = {"level", j, -1, -1, -1, {}, {}, ratio, ""};
    }
    running.push_back(report.empirical_sup_logk);
  }
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

// ---------------------------------------------------------------------------
// Sawyer testing constant: ∫_B M(χ_B σ)^p w / σ(B)
// ---------------------------------------------------------------------------

// Ratio for a single ball. The ball is materialized; every maximal-function
// evaluation uses true infinite-tree ball sizes, so vertices outside the
// truncation — where χ_B σ vanishes — contribute exactly their cardinality.
inline double sawyer_ball_ratio_logk(const TreeParams& t, const LevelWeight& w,
                                     const Rational& p, const Vertex& center, long long radius,
                                     long long truncation_depth,
                                     std::size_t node_budget = TruncatedTree::kDefaultNodeBudget) {
  require(Rational(1) < p, "testing condition requires p > 1");
  require(center.depth() + radius <= truncation_depth,
          "ball must fit inside the truncation");
  const LevelWeight sigma = w.dual(p);
  const double pd = p.to_double();
  TruncatedTree tree(t, static_cast<int>(truncation_depth), node_budget);

  const std::vector<int> dist = tree.bfs_distances(tree.index_of(center));
  std::map<Vertex, double> chi_b_sigma;
  std::vector<Vertex> ball;
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    if (dist[idx] >= 0 && dist[idx] <= radius) {
      const Vertex v = tree.vertex_of(idx);
      chi_b_sigma[v] = linear_from_logk(t.k, sigma.logk_at(v.depth()));
      ball.push_back(v);
    }
  }
  const SparseFunction f(std::move(chi_b_sigma));

  double integral = 0.0;
  double sigma_mass = 0.0;
  for (const Vertex& x : ball) {
    const double m = maximal_ball(t, f, x).value;
    integral += std::pow(m, pd) * linear_from_logk(t.k, w.logk_at(x.depth()));
    sigma_mass += f.at(x);
  }
  return logk_from_linear(t.k, integral) - logk_from_linear(t.k, sigma_mass);
}

inline ConditionReport sawyer_testing_constant(const TreeParams& t, const LevelWeight& w,
                                               const Rational& p, long long center_depth_max,
                                               long long radius_max, long long truncation_depth,
                                               std::size_t node_budget =
                                                   TruncatedTree::kDefaultNodeBudget) {
  ConditionReport report;
  report.condition = "sawyer-testing";
  report.params = {{"p", p.to_double()}, {"k", static_cast<double>(t.k)},
                   {"center_depth_max", static_cast<double>(center_depth_max)},
                   {"radius_max", static_cast<double>(radius_max)},
                   {"truncation_depth", static_cast<double>(truncation_depth)}};
  long long rejected = 0;
  std::vector<double> running;
  for (long long radius = 0; radius <= radius_max; ++radius) {
    for (long long jc = 0; jc <= center_depth_max; ++jc) {
      if (jc + radius > truncation_depth) {
        ++rejected;  // clipped balls are rejected, not approximated
        continue;
      }
      Vertex center;
      for (long long d = 0; d < jc; ++d) center = center.child(0);
      const double ratio =
          sawyer_ball_ratio_logk(t, w, p, center, radius, truncation_depth, node_budget);
      if (ratio > report.empirical_sup_logk) {
        report.empirical_sup_logk = ratio;
        report.witness = {"ball", jc, -1, radius, -1, {}, {}, ratio, ""};
      }
    }
    running.push_back(report.empirical_sup_logk);
  }
  report.grid["rejected_balls"] = std::to_string(rejected);
  report.verdict = classify_running_sup_logk(t.k, running);
  return report;
}

// ---------------------------------------------------------------------------
// Level-pair min bound and the ρ-optimization behind it
// ---------------------------------------------------------------------------

// min{ k^{(r-m)(p-δ)} k^{rδ} w(E_j), k^m w(F_i) } for the unique m with
// i = j + r - 2m; rejects infeasible (j, i, r).
inline double corsuff_pairing_bound_logk(const TreeParams& t, long long j, long long i,
                                         long long r, double we_logk, double wf_logk,
                                         double p, double delta) {
  (void)t;
  require(p > 1.0, "pairing bound requires p > 1");
  require(delta < 1.0, "pairing bound requires delta < 1");
  const auto slice = SphereLevelSlice::from_levels(j, i, r);
  require(slice.has_value(), "infeasible (j, i, r): parity or range");
  const long long m = slice->up_steps;
  const double first =
      static_cast<double>(r - m) * (p - delta) + static_cast<double>(r) * delta + we_logk;
  const double second = static_cast<double>(m) + wf_logk;
  return std::min(first, second);
}

struct RhoOptimum {
  double rho_star = 0.0;
  double value_logk = kLogZero;   // f(ρ*)
  double c_pd = 0.0;              // explicit constant in the closed bound
  double bound_logk = kLogZero;   // c · k^{pr/(p-δ+1)} wF^{1-1/(p-δ+1)} wE^{1/(p-δ+1)}
};

inline double rho_objective_logk(const TreeParams& t, double p, double delta, long long r,
                                 double we, double wf, double rho) {
  const double lhs = 0.5 * (p + delta) * static_cast<double>(r) +
                     0.5 * rho * (p - delta) + logk_from_linear(t.k, we);
  const double rhs =
      0.5 * static_cast<double>(r) - 0.5 * rho + logk_from_linear(t.k, wf);
  return logk_add(t.k, lhs, rhs);
}

// Closed-form minimizer of f(ρ) = k^{(p+δ)r/2} k^{ρ(p-δ)/2} wE + k^{r/2} k^{-ρ/2} wF.
inline RhoOptimum rho_optimize(const TreeParams& t, double p, double delta, long long r,
                               double we, double wf) {
  require(p > 1.0, "rho optimization requires p > 1");
  require(delta < 1.0, "rho optimization requires delta < 1");
  require(we > 0.0 && wf > 0.0, "rho optimization requires positive masses");
  const double denom = p - delta + 1.0;
  RhoOptimum out;
  out.rho_star = 2.0 * std::log(wf / (we * (p - delta))) / ln_k(t.k) / denom -
                 (p + delta - 1.0) * static_cast<double>(r) / denom;
  out.value_logk = rho_objective_logk(t, p, delta, r, we, wf, out.rho_star);
  out.c_pd = std::pow(p - delta, -(p - delta) / denom) + std::pow(p - delta, 1.0 / denom);
  out.bound_logk = logk_from_linear(t.k, out.c_pd) +
                   p / denom * static_cast<double>(r) +
                   (1.0 - 1.0 / denom) * logk_from_linear(t.k, wf) +
                   (1.0 / denom) * logk_from_linear(t.k, we);
  return out;
}

}  // namespace treemax
