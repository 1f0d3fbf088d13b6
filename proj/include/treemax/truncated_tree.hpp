#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "treemax/tree.hpp"

namespace treemax {

struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// The tree truncated at a fixed depth, materialized with breadth-first
// indices. This is the substrate for every enumeration oracle: spheres come
// out of graph search here, never out of the closed-form counts they check.
class TruncatedTree {
 public:
  static constexpr std::size_t kDefaultNodeBudget = std::size_t(1) << 20;

  TruncatedTree(TreeParams params, int depth_limit,
                std::size_t node_budget = kDefaultNodeBudget)
      : params_(params), depth_limit_(depth_limit) {
    if (depth_limit < 0) throw std::invalid_argument("negative depth limit");
    offsets_.push_back(0);
    std::uint64_t level = 1;
    std::uint64_t total = 0;
    for (int d = 0; d <= depth_limit; ++d) {
      total += level;
      if (total > node_budget)
        throw BudgetError("materialized tree of depth " + std::to_string(depth_limit) +
                          " exceeds the node budget of " + std::to_string(node_budget));
      offsets_.push_back(total);
      level *= static_cast<std::uint64_t>(params_.k);
    }
  }

  int k() const { return params_.k; }
  const TreeParams& params() const { return params_; }
  int depth_limit() const { return depth_limit_; }
  std::size_t node_count() const { return static_cast<std::size_t>(offsets_.back()); }

  std::uint64_t level_offset(int d) const { return offsets_[static_cast<std::size_t>(d)]; }
  std::uint64_t level_size(int d) const {
    return offsets_[static_cast<std::size_t>(d) + 1] - offsets_[static_cast<std::size_t>(d)];
  }

  int depth_of(std::size_t idx) const {
    int d = 0;
    while (offsets_[static_cast<std::size_t>(d) + 1] <= idx) ++d;
    return d;
  }

  std::size_t parent(std::size_t idx) const {
    const int d = depth_of(idx);
    const std::uint64_t rank = idx - offsets_[static_cast<std::size_t>(d)];
    return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(d) - 1] +
                                    rank / static_cast<std::uint64_t>(params_.k));
  }

  std::size_t child(std::size_t idx, int c) const {
    const int d = depth_of(idx);
    const std::uint64_t rank = idx - offsets_[static_cast<std::size_t>(d)];
    return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(d) + 1] +
                                    rank * static_cast<std::uint64_t>(params_.k) +
                                    static_cast<std::uint64_t>(c));
  }

  std::size_t index_of(const Vertex& v) const {
    if (v.depth() > depth_limit_)
      throw std::invalid_argument("vertex lies below the truncation depth");
    std::uint64_t rank = 0;
    for (std::uint8_t digit : v.path()) {
      if (digit >= params_.k) throw std::invalid_argument("path digit exceeds k");
      rank = rank * static_cast<std::uint64_t>(params_.k) + digit;
    }
    return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v.depth())] + rank);
  }

  Vertex vertex_of(std::size_t idx) const {
    const int d = depth_of(idx);
    std::uint64_t rank = idx - offsets_[static_cast<std::size_t>(d)];
    std::vector<std::uint8_t> path(static_cast<std::size_t>(d));
    for (int t = d - 1; t >= 0; --t) {
      path[static_cast<std::size_t>(t)] =
          static_cast<std::uint8_t>(rank % static_cast<std::uint64_t>(params_.k));
      rank /= static_cast<std::uint64_t>(params_.k);
    }
    return Vertex(std::move(path));
  }

  // Edge distances from `center` to every node, by breadth-first search over
  // the parent/child adjacency.
  std::vector<int> bfs_distances(std::size_t center) const {
    std::vector<int> dist(node_count(), -1);
    std::deque<std::size_t> queue;
    dist[center] = 0;
    queue.push_back(center);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      const int d = dist[u];
      const int depth = depth_of(u);
      if (depth > 0) {
        const std::size_t p = parent(u);
        if (dist[p] < 0) {
          dist[p] = d + 1;
          queue.push_back(p);
        }
      }
      if (depth < depth_limit_) {
        for (int c = 0; c < params_.k; ++c) {
          const std::size_t ch = child(u, c);
          if (dist[ch] < 0) {
            dist[ch] = d + 1;
            queue.push_back(ch);
          }
        }
      }
    }
    return dist;
  }

  std::vector<std::size_t> sphere(std::size_t center, int r) const {
    const std::vector<int> dist = bfs_distances(center);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (dist[i] == r) out.push_back(i);
    return out;
  }

 private:
  TreeParams params_;
  int depth_limit_;
  std::vector<std::uint64_t> offsets_;  // offsets_[d] = first index of depth d
};

// Exact sphere {y : d(x,y) = r} inside a truncation deep enough to contain it.
inline std::vector<Vertex> enumerate_sphere(const TreeParams& t, const Vertex& x,
                                            long long r, int depth_limit,
                                            std::size_t node_budget =
                                                TruncatedTree::kDefaultNodeBudget) {
  x.validate(t);
  if (x.depth() + r > depth_limit)
    throw std::invalid_argument("sphere reaches past the truncation depth");
  TruncatedTree tree(t, depth_limit, node_budget);
  std::vector<Vertex> out;
  for (std::size_t idx : tree.sphere(tree.index_of(x), static_cast<int>(r)))
    out.push_back(tree.vertex_of(idx));
  return out;
}

}  // namespace treemax
