#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "treemax/conditions.hpp"
#include "treemax/operators.hpp"
#include "treemax/serialize.hpp"

namespace treemax {

inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline void cross_check(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("experiment cross-check failed: " + what);
}

inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? true : std::abs(a - b) <= tol * scale;
}

}  // namespace detail

// ||M° χ_{T_j}||_{L^q(w)} / ||χ_{T_j}||_{L^q(w)} summed over levels up to the
// horizon, reported at the half and full horizon so growth is visible.
struct StrongRatio {
  double ratio_half_logk = kLogZero;
  double ratio_full_logk = kLogZero;
  bool stabilized = false;
};

inline StrongRatio strong_type_ratio(const TreeParams& t, long long j, const LevelWeight& w,
                                     double q, long long horizon) {
  const LevelFunction f = LevelFunction::indicator(j);
  const double norm_f_logk = level_mass_logk(t, w, j) / q;
  LogkSum sum(t.k);
  StrongRatio out;
  for (long long i = 0; i <= horizon; ++i) {
    const double profile = maximal_sphere(t, f, i).value;
    if (profile > 0.0)
      sum.add(q * logk_from_linear(t.k, profile) + level_mass_logk(t, w, i));
    if (i == horizon / 2) out.ratio_half_logk = sum.value_logk() / q - norm_f_logk;
  }
  out.ratio_full_logk = sum.value_logk() / q - norm_f_logk;
  out.stabilized =
      std::abs(1.0 - linear_from_logk(t.k, out.ratio_half_logk - out.ratio_full_logk)) < 0.01;
  return out;
}

// ---------------------------------------------------------------------------
// Sphere-A_p blow-up along the diagonal, with the M_s w bound holding
// ---------------------------------------------------------------------------

inline ResultTable run_thmneg1(const TreeParams& t, const Rational& delta, long long j_max,
                               double s = std::numeric_limits<double>::quiet_NaN()) {
  const double d = delta.to_double();
  require(d > 0.5 && d < 1.0, "diagonal blow-up experiment requires delta in (1/2, 1)");
  const LevelWeight w = LevelWeight::power(-delta);
  const Rational p(2);
  const LevelWeight sigma = w.dual(p);
  if (std::isnan(s)) s = 1.2 < 1.0 / d ? 1.2 : 0.5 * (1.0 + 1.0 / d);
  require(s > 1.0 && s < 1.0 / d, "s must lie in (1, 1/delta)");

  // Independent path: recompute small diagonal cells from enumerated spheres.
  for (long long j = 1; j <= 4; ++j) {
    Vertex x;
    for (long long step = 0; step < j; ++step) x = x.child(0);
    const auto sphere = enumerate_sphere(t, x, j, static_cast<int>(2 * j));
    double w_mass = 0.0, s_mass = 0.0;
    for (const Vertex& y : sphere) {
      w_mass += linear_from_logk(t.k, w.logk_at(y.depth()));
      s_mass += linear_from_logk(t.k, sigma.logk_at(y.depth()));
    }
    const double size = static_cast<double>(sphere.size());
    const double direct = logk_from_linear(t.k, w_mass / size) +
                          (p.to_double() - 1.0) * logk_from_linear(t.k, s_mass / size);
    const double fast = ap_product_logk(t, w, sigma, p.to_double(), Geometry::kSphere, j, j);
    detail::cross_check(detail::close_rel(direct, fast, 1e-9),
                        "diagonal sphere product vs enumeration");
  }

  ResultTable table;
  table.experiment = "thmneg1";
  table.columns = {"j", "r", "logk_ap_sphere"};
  std::vector<double> xs, ys;
  for (long long j = 1; j <= j_max; ++j) {
    const double q_val = ap_product_logk(t, w, sigma, p.to_double(), Geometry::kSphere, j, j);
    table.add_row({std::to_string(j), std::to_string(j), format_double(q_val)});
    if (3 * j >= j_max) {  // last two thirds of the range
      xs.push_back(static_cast<double>(j));
      ys.push_back(q_val);
    }
  }
  const double slope = fit_slope(xs, ys);

  const ConditionReport ms = ms_bound(t, w, s, 200);
  table.meta["k"] = t.k;
  table.meta["delta"] = delta.str();
  table.meta["p"] = p.to_double();
  table.meta["s"] = s;
  table.meta["j_max"] = j_max;
  table.meta["ms_verdict"] = ms.verdict;
  table.summary["slope"] = slope;
  table.summary["slope_target"] = 2.0 * d - 1.0;
  table.summary["ms_sup_logk"] = ms.empirical_sup_logk;
  table.summary["ms_bounded"] = ms.verdict == "bounded-on-grid" ? 1.0 : 0.0;
  return table;
}

// ---------------------------------------------------------------------------
// Weak type holds while the strong-type level sums diverge linearly
// ---------------------------------------------------------------------------

inline ResultTable run_neg2(const TreeParams& t, const Rational& p, long long j,
                            const std::vector<long long>& windows = {25, 50},
                            long long weak_horizon = 60) {
  require(Rational(1) < p, "experiment requires p > 1");
  const double pd = p.to_double();
  const LevelWeight w = LevelWeight::power(p - Rational(1));
  const LevelFunction f = LevelFunction::indicator(j);

  // ||f||_p^p = k^{pj}, and the profile above the support level is exactly
  // 1/|S(·, i-j)|: both recomputed independently here before anything is
  // reported.
  const double norm_pow_p_logk = pd * static_cast<double>(j);
  detail::cross_check(
      detail::close_rel(pd * lp_norm_logk(t, f, w, pd), norm_pow_p_logk, 1e-12),
      "||chi||_p^p vs closed form");
  for (long long i = j + 1; i <= j + 4; ++i) {
    const double prof = maximal_sphere(t, f, i).value;
    const double direct = 1.0 / linear_from_logk(t.k, sphere_size_logk(t, i, i - j));
    detail::cross_check(detail::close_rel(prof, direct, 1e-12),
                        "maximal profile vs ancestor-hit closed form");
  }

  ResultTable table;
  table.experiment = "neg2";
  table.columns = {"kind", "index", "logk_value", "linear_value"};
  table.add_row({"lp_norm_pow_p", std::to_string(j), format_double(norm_pow_p_logk),
                 format_double(linear_from_logk(t.k, norm_pow_p_logk))});

  std::vector<double> window_logk;
  for (long long window : windows) {
    LogkSum sum(t.k);
    for (long long i = j + 1; i <= j + window; ++i) {
      const double prof = maximal_sphere(t, f, i).value;
      if (prof > 0.0)
        sum.add(pd * logk_from_linear(t.k, prof) + level_mass_logk(t, w, i));
    }
    window_logk.push_back(sum.value_logk());
    table.add_row({"window_sum", std::to_string(window), format_double(sum.value_logk()),
                   format_double(linear_from_logk(t.k, sum.value_logk()))});
  }
  for (std::size_t i = 1; i < windows.size(); ++i) {
    const double growth = linear_from_logk(t.k, window_logk[i] - window_logk[i - 1]);
    table.summary["growth_" + std::to_string(windows[i]) + "_over_" +
                  std::to_string(windows[i - 1])] = growth;
  }

  WeakOptions opts;
  opts.level_horizon = weak_horizon;
  const WeakTypeProfile weak1 = weak_profile(t, f, w, pd, opts);
  opts.level_horizon = 2 * weak_horizon;
  const WeakTypeProfile weak2 = weak_profile(t, f, w, pd, opts);
  const double fun1 = pd * weak1.sup_logk;
  const double fun2 = pd * weak2.sup_logk;
  table.add_row({"weak_functional_pow_p", std::to_string(weak_horizon), format_double(fun1),
                 format_double(linear_from_logk(t.k, fun1))});
  table.add_row({"weak_functional_pow_p", std::to_string(2 * weak_horizon),
                 format_double(fun2), format_double(linear_from_logk(t.k, fun2))});
  table.summary["weak_rel_change"] = std::abs(1.0 - linear_from_logk(t.k, fun1 - fun2));
  table.summary["weak_diverged"] = weak1.diverged || weak2.diverged ? 1.0 : 0.0;

  table.meta["k"] = t.k;
  table.meta["p"] = p.str();
  table.meta["j"] = j;
  table.meta["weak_horizon"] = weak_horizon;
  return table;
}

// ---------------------------------------------------------------------------
// The level-wise condition for w = k^{j(p-1)}, with strong tables above p
// ---------------------------------------------------------------------------

inline ResultTable run_kalpha(const TreeParams& t, const Rational& p, long long j_max = 40,
                              long long r_max = 40, long long horizon = 400,
                              double extra_q = std::numeric_limits<double>::quiet_NaN()) {
  require(Rational(1) < p, "experiment requires p > 1");
  const double pd = p.to_double();
  const LevelWeight w = LevelWeight::power(p - Rational(1));
  const double delta = (Rational(1) - p).to_double();

  // Independent path for one grid cell: enumerate T_i ∩ S(x, r) and compare
  // masses against the closed-form cell the checker uses.
  {
    const long long j = 3, r = 2, m = 1, i = j + r - 2 * m;
    Vertex x;
    for (long long step = 0; step < j; ++step) x = x.child(0);
    double mass = 0.0;
    for (const Vertex& y : enumerate_sphere(t, x, r, static_cast<int>(j + r)))
      if (y.depth() == i) mass += linear_from_logk(t.k, w.logk_at(i));
    const double cell =
        sphere_level_count_logk(t, j, r, m) + w.logk_at(i) -
        (static_cast<double>(r - m) * (pd - delta) + static_cast<double>(r) * delta) -
        w.logk_at(j);
    const double direct = logk_from_linear(t.k, mass) -
                          (static_cast<double>(r - m) * (pd - delta) +
                           static_cast<double>(r) * delta) -
                          w.logk_at(j);
    detail::cross_check(detail::close_rel(cell, direct, 1e-9),
                        "level-wise cell vs enumerated slice mass");
  }

  const ConditionReport levelwise = levelwise_condition_sup(t, w, pd, delta, j_max, r_max);

  ResultTable table;
  table.experiment = "kalpha";
  table.columns = {"table", "q", "j", "logk_value", "stabilized"};
  table.add_row({"levelwise_sup", format_double(pd), "-",
                 format_double(levelwise.empirical_sup_logk), levelwise.verdict});
  std::vector<double> q_values = {pd, 1.5 * pd, 2.0 * pd};
  if (!std::isnan(extra_q)) {
    require(extra_q > pd, "extra strong-type exponent must exceed p");
    q_values.push_back(extra_q);
  }
  const std::vector<long long> family = {2, 5, 8};
  for (double q : q_values) {
    for (long long j : family) {
      const StrongRatio ratio = strong_type_ratio(t, j, w, q, horizon);
      table.add_row({"strong_ratio", format_double(q), std::to_string(j),
                     format_double(ratio.ratio_full_logk),
                     ratio.stabilized ? "true" : "false"});
      if (q == pd)
        table.summary["strong_p_stabilized_j" + std::to_string(j)] =
            ratio.stabilized ? 1.0 : 0.0;
      if (q == 2.0 * pd)
        table.summary["strong_2p_stabilized_j" + std::to_string(j)] =
            ratio.stabilized ? 1.0 : 0.0;
    }
  }
  for (long long j : family) {
    const WeakTypeProfile weak = weak_profile(t, LevelFunction::indicator(j), w, pd);
    const double ratio = pd * weak.sup_logk - pd * static_cast<double>(j);
    table.add_row({"weak_ratio", format_double(pd), std::to_string(j), format_double(ratio),
                   weak.diverged ? "diverged" : "true"});
  }

  table.meta["k"] = t.k;
  table.meta["p"] = p.str();
  table.meta["delta"] = delta;
  table.meta["j_max"] = j_max;
  table.meta["r_max"] = r_max;
  table.meta["levelwise_verdict"] = levelwise.verdict;
  table.summary["levelwise_sup_logk"] = levelwise.empirical_sup_logk;
  table.summary["levelwise_bound_target"] = 1.0 + 1.0 / static_cast<double>(t.k);
  return table;
}

// ---------------------------------------------------------------------------
// M_s w ≲ w: pair condition samples, series convergence, dual strong table
// ---------------------------------------------------------------------------

inline ResultTable run_a1ap(const TreeParams& t, const LevelWeight& w, double s,
                            const Rational& p, long long j_max = 30, long long r_max = 30,
                            long long series_r_max = 60) {
  require(s > 1.0, "experiment requires s > 1");
  require(Rational(1) < p, "experiment requires p > 1");
  const double pd = p.to_double();
  const double sprime = s / (s - 1.0);
  ConditionParams cp;
  cp.p = pd;
  cp.beta = sprime / (sprime + 1.0);
  cp.alpha = sprime * pd / (sprime + 1.0);

  ResultTable table;
  table.experiment = "a1ap";
  table.columns = {"table", "index", "logk_value", "flag"};

  const ConditionReport ms = ms_bound(t, w, s, 200);
  table.add_row({"ms_bound", "-", format_double(ms.empirical_sup_logk), ms.verdict});

  double suff_sup = kLogZero;
  const std::vector<double> sup_by_r = suffcond_slice_sup_by_r(t, w, w, cp, j_max, r_max);
  for (long long r = 0; r <= r_max; ++r) {
    const double sup_r = sup_by_r[static_cast<std::size_t>(r)];
    table.add_row({"suffcond_sup_by_r", std::to_string(r), format_double(sup_r), "-"});
    if (sup_r > suff_sup) suff_sup = sup_r;
  }

  const LevelFunction f = LevelFunction::indicator(3);
  const SeriesSum series = series_norm_sum(t, f, w, pd, series_r_max);
  detail::cross_check(
      detail::close_rel(series.term_logk[0], lp_norm_logk(t, f, w, pd), 1e-12),
      "series r = 0 term vs ||f||");
  for (long long r = 0; r <= series_r_max; ++r)
    table.add_row({"series_partial", std::to_string(r),
                   format_double(series.partial_logk[static_cast<std::size_t>(r)]), "-"});

  const LevelWeight sigma = w.dual(p);
  const double pprime = pd / (pd - 1.0);
  for (long long j : {2ll, 5ll, 8ll}) {
    const StrongRatio ratio = strong_type_ratio(t, j, sigma, pprime, 400);
    table.add_row({"dual_strong_ratio", std::to_string(j),
                   format_double(ratio.ratio_full_logk),
                   ratio.stabilized ? "true" : "false"});
    table.summary["dual_stabilized_j" + std::to_string(j)] = ratio.stabilized ? 1.0 : 0.0;
  }

  const double weak_exponent = cp.beta / cp.alpha * pd;
  detail::cross_check(std::abs(weak_exponent - 1.0) < 1e-12,
                      "weak exponent (beta/alpha)p must equal 1 for alpha = beta p");
  table.meta["k"] = t.k;
  table.meta["p"] = p.str();
  table.meta["s"] = s;
  table.meta["beta"] = cp.beta;
  table.meta["alpha"] = cp.alpha;
  table.meta["weight"] = w.descriptor();
  table.meta["ms_verdict"] = ms.verdict;
  table.summary["ms_sup_logk"] = ms.empirical_sup_logk;
  table.summary["ms_bounded"] = ms.verdict == "bounded-on-grid" ? 1.0 : 0.0;
  table.summary["suffcond_sup_logk"] = suff_sup;
  table.summary["series_converged"] = series.converged ? 1.0 : 0.0;
  table.summary["series_tail_increment"] = series.tail_increment;
  table.summary["weak_exponent"] = weak_exponent;
  return table;
}

// ---------------------------------------------------------------------------
// Sawyer testing constant bounded while the strong type fails
// ---------------------------------------------------------------------------

inline ResultTable run_sawyer_vs_strong(const TreeParams& t, const Rational& p,
                                        long long truncation_depth = 14,
                                        long long center_depth_max = 8,
                                        long long radius_max = 6) {
  require(Rational(1) < p, "experiment requires p > 1");
  const double pd = p.to_double();
  const LevelWeight w = LevelWeight::power(p - Rational(1));

  // Level symmetry makes the ratio depend on the center only through its
  // depth; verify on two distinct depth-3 centers before trusting one
  // representative per depth.
  {
    const Vertex a = Vertex{0, 0, 0};
    const Vertex b = Vertex{1, 0, 1};
    const long long radius = std::min<long long>(3, radius_max);
    const double ra = sawyer_ball_ratio_logk(t, w, p, a, radius, truncation_depth);
    const double rb = sawyer_ball_ratio_logk(t, w, p, b, radius, truncation_depth);
    detail::cross_check(detail::close_rel(ra, rb, 1e-12),
                        "testing ratio must be invariant across same-depth centers");
  }

  ResultTable table;
  table.experiment = "sawyer";
  table.columns = {"center_depth", "radius", "logk_ratio", "linear_ratio"};
  double sup = kLogZero;
  for (long long jc = 0; jc <= center_depth_max; ++jc) {
    Vertex center;
    for (long long d = 0; d < jc; ++d) center = center.child(0);
    for (long long radius = 0; radius <= radius_max; ++radius) {
      if (jc + radius > truncation_depth) continue;
      const double ratio = sawyer_ball_ratio_logk(t, w, p, center, radius, truncation_depth);
      if (ratio > sup) sup = ratio;
      table.add_row({std::to_string(jc), std::to_string(radius), format_double(ratio),
                     format_double(linear_from_logk(t.k, ratio))});
    }
  }

  const ResultTable neg2 = run_neg2(t, p, 5);
  const double growth = neg2.summary.at("growth_50_over_25");

  table.meta["k"] = t.k;
  table.meta["p"] = p.str();
  table.meta["truncation_depth"] = truncation_depth;
  table.meta["center_depth_max"] = center_depth_max;
  table.meta["radius_max"] = radius_max;
  table.summary["testing_sup_logk"] = sup;
  table.summary["strong_window_growth"] = growth;
  table.summary["testing_bounded_strong_growing"] =
      (linear_from_logk(t.k, sup) < 1e6 && growth > 1.5) ? 1.0 : 0.0;
  return table;
}

}  // namespace treemax
