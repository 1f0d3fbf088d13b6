#pragma once

#include <ostream>
#include <sstream>

#include "treemax/conditions.hpp"
#include "treemax/config.hpp"
#include "treemax/experiments.hpp"
#include "treemax/oracle.hpp"
#include "treemax/operators.hpp"
#include "treemax/serialize.hpp"

// Compact oracle-equivalence suites behind the CLI --selftest flag. Each
// returns 0 on success and prints one line per check.

namespace treemax::selftest {

namespace detail {

struct Runner {
  std::ostream& os;
  int failures = 0;

  void check(bool ok, const std::string& name) {
    os << (ok ? "[ok] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  }
};

}  // namespace detail

inline int geometry(std::ostream& os) {
  detail::Runner run{os};
  for (int k : {2, 3}) {
    const TreeParams t(k);
    const int depth_limit = 8;
    const TruncatedTree tree(t, depth_limit);
    bool counts_ok = true, sizes_ok = true;
    for (long long j = 0; j + 0 <= depth_limit && counts_ok; ++j) {
      for (long long r = 0; j + r <= depth_limit; ++r) {
        Vertex x;
        for (long long d = 0; d < j; ++d) x = x.child(d % 2);
        const auto sphere = tree.sphere(tree.index_of(x), static_cast<int>(r));
        std::map<long long, std::uint64_t> by_level;
        for (std::size_t idx : sphere) ++by_level[tree.depth_of(idx)];
        std::uint64_t total = 0;
        for (long long m = 0; m <= std::min(j, r); ++m) {
          const std::uint64_t cnt = sphere_level_count(t, j, r, m);
          total += cnt;
          const auto it = by_level.find(j + r - 2 * m);
          const std::uint64_t enumerated = it == by_level.end() ? 0 : it->second;
          if (cnt != enumerated) counts_ok = false;
        }
        if (total != sphere_size(t, j, r) || sphere.size() != sphere_size(t, j, r))
          sizes_ok = false;
      }
    }
    run.check(counts_ok, "k=" + std::to_string(k) + " level counts match enumeration");
    run.check(sizes_ok, "k=" + std::to_string(k) + " sphere sizes match enumeration");
  }
  return run.failures == 0 ? 0 : 1;
}

inline int weights(std::ostream& os) {
  detail::Runner run{os};
  const TreeParams t(2);
  const LevelWeight w = LevelWeight::power(Rational(1));
  Vertex x = Vertex{0, 0, 0};
  const auto sphere = enumerate_sphere(t, x, 3, 8);
  double direct = 0.0;
  for (const Vertex& y : sphere) direct += linear_from_logk(t.k, w.logk_at(y.depth()));
  const double fast = linear_from_logk(t.k, sphere_weight_logk(t, w, 3, 3));
  run.check(std::abs(direct - fast) <= 1e-9 * fast, "sphere weight matches enumerated sum");
  const LevelWeight sigma = w.dual(Rational(2));
  run.check(sigma.is_power() && sigma.exponent() == Rational(-1),
            "dual of power(1) at p=2 is power(-1)");
  const LevelWeight back = sigma.dual(Rational(2));
  run.check(back.exponent() == Rational(1), "duality involution at conjugate exponents");
  return run.failures == 0 ? 0 : 1;
}

inline int operators(std::ostream& os) {
  detail::Runner run{os};
  const TreeParams t(2);
  const TruncatedTree tree(t, 9);
  std::vector<oracle::Rat> f(tree.node_count(), oracle::Rat(0));
  for (std::size_t i = tree.level_offset(5); i < tree.level_offset(6); ++i)
    f[i] = oracle::Rat(1);
  const LevelFunction chi5 = LevelFunction::indicator(5);
  bool agree = true;
  for (long long depth = 0; depth <= 4; ++depth) {
    Vertex x;
    for (long long d = 0; d < depth; ++d) x = x.child(0);
    for (long long r = 0; depth + r <= 9; ++r) {
      const double fast = sphere_average(t, chi5, depth, r);
      const double exact = oracle::to_double(
          oracle::sphere_average(tree, f, tree.index_of(x), static_cast<int>(r)));
      if (std::abs(fast - exact) > 1e-9 * std::max(1.0, exact)) agree = false;
    }
  }
  run.check(agree, "level fast path matches the rational oracle");
  const LevelFunction ones(std::vector<double>(24, 1.0));
  bool unit = true;
  for (long long depth = 0; depth <= 6; ++depth)
    for (long long r = 0; r <= 12; ++r)
      if (sphere_average(t, ones, depth, r) != 1.0) unit = false;
  run.check(unit, "A_r(1) = 1 exactly");
  return run.failures == 0 ? 0 : 1;
}

inline int conditions(std::ostream& os) {
  detail::Runner run{os};
  const TreeParams t(2);
  const LevelWeight w0 = LevelWeight::power(Rational(0));
  const double fast = pair_measure_slices_logk(t, w0, 2, 4, 2);
  const TruncatedTree tree(t, 4);
  std::vector<Vertex> e_set, f_set;
  for (std::uint64_t i = tree.level_offset(2); i < tree.level_offset(3); ++i)
    e_set.push_back(tree.vertex_of(static_cast<std::size_t>(i)));
  for (std::uint64_t i = tree.level_offset(4); i < tree.level_offset(5); ++i)
    f_set.push_back(tree.vertex_of(static_cast<std::size_t>(i)));
  const double explicit_pm = pair_measure_logk(t, Weight(w0), e_set, f_set, 2);
  run.check(std::abs(linear_from_logk(2, fast) - linear_from_logk(2, explicit_pm)) < 1e-9,
            "slice fast path matches explicit pair measure");
  const auto report = levelwise_condition_sup(t, LevelWeight::power(Rational(1)), 2.0, -1.0,
                                              20, 20);
  run.check(report.empirical_sup_logk <= logk_from_linear(2, 1.5) + 1e-12,
            "level-wise sup within 1 + 1/k for the power(p-1) weight");
  const double cell =
      sphere_level_count_logk(t, report.witness.j, report.witness.r, report.witness.m) +
      LevelWeight::power(Rational(1)).logk_at(report.witness.i) -
      (static_cast<double>(report.witness.r - report.witness.m) * 3.0 +
       static_cast<double>(report.witness.r) * -1.0) -
      LevelWeight::power(Rational(1)).logk_at(report.witness.j);
  run.check(std::abs(cell - report.empirical_sup_logk) < 1e-12,
            "witness re-evaluation reproduces the sup");
  return run.failures == 0 ? 0 : 1;
}

inline int experiments(std::ostream& os) {
  detail::Runner run{os};
  const TreeParams t(2);
  const auto serialize = [](const ResultTable& table) {
    std::ostringstream out;
    write_csv(table, out);
    out << to_json(table).dump();
    return out.str();
  };
  const std::string a = serialize(run_neg2(t, Rational(2), 4, {10, 20}, 30));
  const std::string b = serialize(run_neg2(t, Rational(2), 4, {10, 20}, 30));
  run.check(a == b, "experiment output is byte-stable");
  return run.failures == 0 ? 0 : 1;
}

inline int config(std::ostream& os) {
  detail::Runner run{os};
  RunConfig c;
  c.p = "1.5";
  c.weight = "power:a=-0.75";
  c.mode = "assert:2.5";
  RunConfig back = RunConfig::from_kv(c.to_kv());
  run.check(back == c, "config round-trips through key=value form");
  return run.failures == 0 ? 0 : 1;
}

inline int all(std::ostream& os) {
  int rc = 0;
  rc |= geometry(os);
  rc |= weights(os);
  rc |= operators(os);
  rc |= conditions(os);
  rc |= experiments(os);
  rc |= config(os);
  return rc;
}

}  // namespace treemax::selftest
