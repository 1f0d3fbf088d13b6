#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "treemax/tree.hpp"

namespace treemax {

// Level-symmetric test function: g(j) for j up to the table end, zero beyond.
class LevelFunction {
 public:
  LevelFunction() = default;
  explicit LevelFunction(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (v < 0) throw std::invalid_argument("level function values must be nonnegative");
  }

  static LevelFunction indicator(long long level) {
    std::vector<double> v(static_cast<std::size_t>(level) + 1, 0.0);
    v.back() = 1.0;
    return LevelFunction(std::move(v));
  }

  double at(long long j) const {
    if (j < 0 || j >= static_cast<long long>(values_.size())) return 0.0;
    return values_[static_cast<std::size_t>(j)];
  }

  // Highest level carrying a nonzero value; -1 for the zero function.
  long long max_level() const {
    for (long long j = static_cast<long long>(values_.size()) - 1; j >= 0; --j)
      if (values_[static_cast<std::size_t>(j)] != 0.0) return j;
    return -1;
  }

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Finitely supported test function with explicit vertices.
class SparseFunction {
 public:
  SparseFunction() = default;
  explicit SparseFunction(std::map<Vertex, double> support) {
    support_.reserve(support.size());
    for (auto& [v, val] : support) {
      if (val < 0) throw std::invalid_argument("sparse function values must be nonnegative");
      if (val != 0.0) support_.emplace_back(v, val);
    }
  }

  const std::vector<std::pair<Vertex, double>>& support() const { return support_; }
  bool empty() const { return support_.empty(); }

  double at(const Vertex& v) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), v,
                               [](const auto& e, const Vertex& key) { return e.first < key; });
    if (it != support_.end() && it->first == v) return it->second;
    return 0.0;
  }

  long long max_depth() const {
    long long d = 0;
    for (const auto& [v, val] : support_) d = std::max(d, v.depth());
    return d;
  }

 private:
  std::vector<std::pair<Vertex, double>> support_;  // sorted by vertex
};

}  // namespace treemax
