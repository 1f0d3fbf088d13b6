#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <vector>

#include "treemax/truncated_tree.hpp"

namespace treemax::oracle {

// Brute-force evaluation on a materialized truncation with exact rational
// arithmetic. Spheres come from breadth-first search and sizes from counting
// what the search found, so nothing here shares a code path with the closed
// forms under test. Weights are restricted to integer powers of k per level
// (optionally overridden per vertex), which keeps every value rational.

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

inline Rat rat_pow(int k, long long e) {
  Int p = 1;
  const long long n = e < 0 ? -e : e;
  for (long long i = 0; i < n; ++i) p *= k;
  return e < 0 ? Rat(1, p) : Rat(p, 1);
}

inline double to_double(const Rat& r) {
  return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

inline Rat rat_ipow(const Rat& base, long long e) {
  Rat p(1);
  for (long long i = 0; i < e; ++i) p *= base;
  return p;
}

// Per-node values of the power weight k^{a·depth}.
inline std::vector<Rat> power_weight_values(const TruncatedTree& tree, long long a) {
  std::vector<Rat> values(tree.node_count());
  for (std::size_t i = 0; i < tree.node_count(); ++i)
    values[i] = rat_pow(tree.k(), a * tree.depth_of(i));
  return values;
}

inline Rat set_sum(const std::vector<Rat>& values, const std::vector<std::size_t>& set) {
  Rat total(0);
  for (std::size_t idx : set) total += values[idx];
  return total;
}

// A_r° f at `center`; the truncation must contain the full sphere.
inline Rat sphere_average(const TruncatedTree& tree, const std::vector<Rat>& f,
                          std::size_t center, int r) {
  if (tree.depth_of(center) + r > tree.depth_limit())
    throw std::invalid_argument("oracle sphere reaches past the truncation");
  const std::vector<int> dist = tree.bfs_distances(center);
  Rat num(0);
  Int count = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] == r) {
      num += f[i];
      ++count;
    }
  }
  return num / Rat(count, 1);
}

inline Rat ball_average(const TruncatedTree& tree, const std::vector<Rat>& f,
                        std::size_t center, int r) {
  if (tree.depth_of(center) + r > tree.depth_limit())
    throw std::invalid_argument("oracle ball reaches past the truncation");
  const std::vector<int> dist = tree.bfs_distances(center);
  Rat num(0);
  Int count = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] >= 0 && dist[i] <= r) {
      num += f[i];
      ++count;
    }
  }
  return num / Rat(count, 1);
}

struct MaxRat {
  Rat value{0};
  int radius = 0;
};

// Exact M° over radii 0..r_max (ties break to the smaller radius).
inline MaxRat maximal_sphere(const TruncatedTree& tree, const std::vector<Rat>& f,
                             std::size_t center, int r_max) {
  MaxRat best;
  best.value = f[center];  // r = 0
  for (int r = 1; r <= r_max; ++r) {
    const Rat v = sphere_average(tree, f, center, r);
    if (v > best.value) best = {v, r};
  }
  return best;
}

inline MaxRat maximal_ball(const TruncatedTree& tree, const std::vector<Rat>& f,
                           std::size_t center, int r_max) {
  MaxRat best;
  best.value = f[center];
  for (int r = 1; r <= r_max; ++r) {
    const Rat v = ball_average(tree, f, center, r);
    if (v > best.value) best = {v, r};
  }
  return best;
}

inline Rat pair_sum(const TruncatedTree& tree, const std::vector<Rat>& f, std::size_t x,
                    int r) {
  const std::vector<int> dist = tree.bfs_distances(x);
  Rat total(0);
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] == r) total += f[i];
  return total;
}

// 1⊗w of the distance-r pairs in E x F.
inline Rat pair_measure(const TruncatedTree& tree, const std::vector<Rat>& w,
                        const std::vector<std::size_t>& e_set,
                        const std::vector<std::size_t>& f_set, int r) {
  Rat total(0);
  for (std::size_t x : e_set) {
    const std::vector<int> dist = tree.bfs_distances(x);
    for (std::size_t y : f_set)
      if (dist[y] == r) total += w[y];
  }
  return total;
}

// Σ f^p w over the truncation, for integer p.
inline Rat lp_power_sum(const std::vector<Rat>& f, const std::vector<Rat>& w, long long p) {
  Rat total(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != Rat(0)) total += rat_ipow(f[i], p) * w[i];
  return total;
}

}  // namespace treemax::oracle
