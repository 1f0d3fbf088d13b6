#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "treemax/rng.hpp"
#include "treemax/tree.hpp"
#include "treemax/truncated_tree.hpp"

using namespace treemax;

TEST_CASE("distance basics") {
  const Vertex root;
  CHECK(distance(root, root) == 0);
  const Vertex x{0, 1};
  CHECK(distance(x, x) == 0);
  const Vertex deep{1, 0, 1, 1};
  CHECK(distance(root, deep) == 4);
  // Frozen from breadth-first search on the materialized depth-5 binary tree.
  CHECK(distance(Vertex{0, 1}, Vertex{1, 0, 0}) == 5);
}

TEST_CASE("distance is a metric on sampled triples") {
  Rng rng(7);
  const TreeParams t(3);
  const auto random_vertex = [&]() {
    std::vector<std::uint8_t> path(static_cast<std::size_t>(rng.range(0, 6)));
    for (auto& d : path) d = static_cast<std::uint8_t>(rng.range(0, 2));
    return Vertex(std::move(path));
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Vertex a = random_vertex(), b = random_vertex(), c = random_vertex();
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, b) >= 0);
    CHECK((distance(a, b) == 0) == (a == b));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c));
  }
}

TEST_CASE("sphere level counts: worked cases") {
  const TreeParams t2(2);
  CHECK(sphere_level_count(t2, 0, 3, 0) == 8);   // k^r descendants
  CHECK(sphere_level_count(t2, 7, 1, 1) == 1);   // the parent
  CHECK(sphere_level_count(TreeParams(5), 3, 1, 1) == 1);
  CHECK(sphere_level_count(t2, 5, 4, 2) == 2);   // frozen from enumeration
  CHECK(sphere_level_count(t2, 2, 4, 3) == 0);   // m beyond min(r, j)
  CHECK(sphere_level_count(t2, 3, 3, 3) == 1);   // the r-th ancestor
}

TEST_CASE("sphere and ball sizes: worked cases") {
  const TreeParams t2(2), t3(3);
  CHECK(sphere_size(t3, 0, 2) == 9);
  CHECK(sphere_size(t2, 5, 3) == 12);
  CHECK(sphere_size(t2, 2, 3) == 11);  // wraps past the root: 8 + 4 - 1
  CHECK(ball_size(t2, 9, 0) == 1);
  CHECK(ball_size(t2, 0, 3) == 15);
  CHECK(ball_size(t2, 6, 2) == 10);
}

TEST_CASE("partition identity and bilateral bound on the grid") {
  for (int k : {2, 3, 5}) {
    const TreeParams t(k);
    for (long long j = 0; j <= 20; ++j) {
      for (long long r = 0; r <= (k == 2 ? 20 : 12); ++r) {
        std::uint64_t total = 0;
        for (long long m = 0; m <= std::min(j, r); ++m)
          total += sphere_level_count(t, j, r, m);
        CHECK(total == sphere_size(t, j, r));
        if (r >= 1) {
          const std::uint64_t kr = ipow_u64(static_cast<std::uint64_t>(k),
                                            static_cast<std::uint64_t>(r));
          CHECK(sphere_size(t, j, r) >= kr);
          CHECK(sphere_size(t, j, r) <= kr + kr / static_cast<std::uint64_t>(k));
        }
      }
    }
  }
}

TEST_CASE("double counting reciprocity") {
  // k^j cnt(j, r, m) = k^i cnt(i, r, r-m): both count T_j x T_i pairs at
  // distance r.
  for (int k : {2, 3}) {
    const TreeParams t(k);
    const long long top = k == 2 ? 18 : 11;
    for (long long j = 0; j <= top; ++j) {
      for (long long r = 0; j + r <= top + 4 && r <= top; ++r) {
        for (long long m = 0; m <= std::min(j, r); ++m) {
          const long long i = j + r - 2 * m;
          const std::uint64_t lhs =
              ipow_u64(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j)) *
              sphere_level_count(t, j, r, m);
          const std::uint64_t rhs =
              ipow_u64(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)) *
              sphere_level_count(t, i, r, r - m);
          CHECK(lhs == rhs);
        }
      }
    }
  }
}

TEST_CASE("closed forms equal brute-force enumeration") {
  for (int k : {2, 3}) {
    const TreeParams t(k);
    const int limit = 8;
    const TruncatedTree tree(t, limit);
    for (long long j = 0; j <= limit; ++j) {
      for (long long r = 0; j + r <= limit; ++r) {
        Vertex x;
        for (long long d = 0; d < j; ++d) x = x.child(static_cast<int>(d) % k);
        const auto sphere = tree.sphere(tree.index_of(x), static_cast<int>(r));
        REQUIRE(sphere.size() == sphere_size(t, j, r));
        std::map<long long, std::uint64_t> by_level;
        for (std::size_t idx : sphere) ++by_level[tree.depth_of(idx)];
        for (long long m = 0; m <= std::min(j, r); ++m) {
          const auto it = by_level.find(j + r - 2 * m);
          const std::uint64_t enumerated = it == by_level.end() ? 0 : it->second;
          CHECK(sphere_level_count(t, j, r, m) == enumerated);
        }
      }
    }
  }
}

TEST_CASE("scaled and log forms are consistent with the exact counts") {
  const TreeParams t(3);
  for (long long j : {0ll, 2ll, 5ll, 9ll}) {
    for (long long r : {0ll, 1ll, 4ll, 9ll}) {
      const double exact = static_cast<double>(sphere_size(t, j, r));
      CHECK(linear_from_logk(3, sphere_size_logk(t, j, r)) ==
            Catch::Approx(exact).epsilon(1e-12));
      CHECK(sphere_size_scaled(t, j, r) * std::pow(3.0, static_cast<double>(r)) ==
            Catch::Approx(exact).epsilon(1e-12));
      CHECK(linear_from_logk(3, ball_size_logk(t, j, r)) ==
            Catch::Approx(static_cast<double>(ball_size(t, j, r))).epsilon(1e-12));
      for (long long m = 0; m <= std::min(j, r); ++m)
        CHECK(linear_from_logk(3, sphere_level_count_logk(t, j, r, m)) ==
              Catch::Approx(static_cast<double>(sphere_level_count(t, j, r, m)))
                  .epsilon(1e-12));
    }
  }
}

TEST_CASE("enumerate_sphere: worked cases and errors") {
  const TreeParams t(2);
  const auto at_root = enumerate_sphere(t, Vertex(), 0, 4);
  REQUIRE(at_root.size() == 1);
  CHECK(at_root[0].is_root());

  const auto two_down = enumerate_sphere(t, Vertex(), 2, 4);
  REQUIRE(two_down.size() == 4);
  for (const Vertex& v : two_down) CHECK(v.depth() == 2);

  // Depth-3 vertex, radius 3: 12 vertices over depths {0, 2, 4, 6} as
  // {1, 1, 2, 8}.
  const auto mixed = enumerate_sphere(t, Vertex{0, 0, 0}, 3, 9);
  REQUIRE(mixed.size() == 12);
  std::map<long long, int> hist;
  for (const Vertex& v : mixed) ++hist[v.depth()];
  CHECK(hist[0] == 1);
  CHECK(hist[2] == 1);
  CHECK(hist[4] == 2);
  CHECK(hist[6] == 8);

  CHECK_THROWS_AS(enumerate_sphere(t, Vertex{0, 0, 0}, 5, 6), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_sphere(t, Vertex(), 4, 25), BudgetError);
}

TEST_CASE("tree parameters and vertex validation") {
  CHECK_THROWS_AS(TreeParams(1), std::invalid_argument);
  const TreeParams t(2);
  CHECK_THROWS_AS(Vertex({0, 2, 1}).validate(t), std::invalid_argument);
  CHECK_NOTHROW(Vertex({0, 1, 1}).validate(t));
  CHECK(Vertex{0, 1}.parent() == Vertex{0});
  CHECK_THROWS_AS(Vertex().parent(), std::invalid_argument);
  CHECK(Vertex{0, 1, 1}.ancestor(2) == Vertex{0});
}

TEST_CASE("truncated tree indexing round-trips") {
  const TreeParams t(3);
  const TruncatedTree tree(t, 5);
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t idx = static_cast<std::size_t>(rng.below(tree.node_count()));
    CHECK(tree.index_of(tree.vertex_of(idx)) == idx);
  }
  CHECK(tree.level_size(3) == 27);
}
