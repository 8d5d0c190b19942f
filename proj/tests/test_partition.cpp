#include "imdp/partition.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace imdp;
using testutil::box;
using testutil::vec;

TEST_CASE("region_of: grid arithmetic and boundaries") {
  const Partition part(box({0, 0}, {1, 1}), {2, 2});
  CHECK(part.decode(part.region_of(vec({0.25, 0.75})).value()) == std::vector<std::size_t>{0, 1});
  // Closed top cells.
  CHECK(part.decode(part.region_of(vec({1.0, 1.0})).value()) == std::vector<std::size_t>{1, 1});
  CHECK_FALSE(part.region_of(vec({1.0000001, 0.5})));
  CHECK_FALSE(part.region_of(vec({-1e-12, 0.5})));
  CHECK_FALSE(part.region_of(vec({std::nan(""), 0.5})));
  // Shared faces belong to the upper cell.
  CHECK(part.decode(part.region_of(vec({0.5, 0.5})).value()) == std::vector<std::size_t>{1, 1});
}

TEST_CASE("region ids: mixed radix, dimension 0 slowest") {
  const Partition part(box({0, 0, 0}, {1, 1, 1}), {2, 3, 4});
  CHECK(part.size() == 24);
  CHECK(part.encode({0, 0, 1}).value == 1);
  CHECK(part.encode({0, 1, 0}).value == 4);
  CHECK(part.encode({1, 0, 0}).value == 12);
  for (std::size_t id = 0; id < part.size(); ++id) {
    CHECK(part.encode(part.decode(RegionId{id})).value == id);
  }
  CHECK_THROWS_AS(part.decode(RegionId{24}), InvalidArgument);
  CHECK_THROWS_AS(part.encode({2, 0, 0}), InvalidArgument);
}

TEST_CASE("region_box: cells and widths") {
  const Partition part(box({0, 0}, {4, 2}), {4, 2});
  const Box b00 = part.region_box(part.encode({0, 0}));
  CHECK(b00.lo == vec({0, 0}));
  CHECK(b00.hi == vec({1, 1}));
  const Box b31 = part.region_box(part.encode({3, 1}));
  CHECK(b31.lo == vec({3, 1}));
  CHECK(b31.hi == vec({4, 2}));
  CHECK_THROWS_AS(part.region_box(RegionId{8}), InvalidArgument);

  const Partition odd(box({-1.3, 0.1}, {2.9, 7.7}), {7, 3});
  for (std::size_t id = 0; id < odd.size(); ++id) {
    const Box b = odd.region_box(RegionId{id});
    CHECK(std::abs((b.hi[0] - b.lo[0]) - 4.2 / 7) <= 1e-12);
    CHECK(std::abs((b.hi[1] - b.lo[1]) - 7.6 / 3) <= 1e-12);
    CHECK(odd.region_of(b.center()).value().value == id);
  }
}

TEST_CASE("region_vertices: ordering and count") {
  const Partition p1(box({0}, {1}), {1});
  const auto v1 = p1.region_vertices(RegionId{0});
  REQUIRE(v1.size() == 2);
  CHECK(v1[0] == vec({0}));
  CHECK(v1[1] == vec({1}));

  const Partition p2(box({0, 0}, {1, 1}), {1, 1});
  const auto v2 = p2.region_vertices(RegionId{0});
  REQUIRE(v2.size() == 4);
  CHECK(v2[0] == vec({0, 0}));
  CHECK(v2[1] == vec({0, 1}));
  CHECK(v2[2] == vec({1, 0}));
  CHECK(v2[3] == vec({1, 1}));

  const Partition p3(box({0, 0, 0}, {1, 2, 3}), {1, 1, 1});
  const auto v3 = p3.region_vertices(RegionId{0});
  CHECK(v3.size() == 8);
  std::set<std::vector<double>> unique;
  for (const auto& v : v3) unique.insert({v[0], v[1], v[2]});
  CHECK(unique.size() == 8);
}

TEST_CASE("label_regions: modes") {
  const Partition grid(box({0, 0}, {2, 2}), {2, 2});
  SUBCASE("goal covering the domain") {
    const auto part = grid.label_regions({box({0, 0}, {2, 2})}, {});
    CHECK(part.goal_regions().size() == 4);
  }
  SUBCASE("touching a face is not an intersection") {
    const auto part = grid.label_regions({}, {box({1, 0}, {3, 0.5})});
    // Only the cells with x in [1, 2] and y in [0, 1] overlap with positive area.
    CHECK(part.critical_regions() == std::vector<RegionId>{part.encode({1, 0})});
    const auto touch = grid.label_regions({}, {box({2, 0}, {3, 2})});
    CHECK(touch.critical_regions().empty());
  }
  SUBCASE("critical wins over goal") {
    const auto part = grid.label_regions({box({0, 0}, {2, 2})}, {box({0.5, 0.5}, {0.6, 0.6})});
    CHECK(part.is_critical(part.encode({0, 0})));
    CHECK_FALSE(part.is_goal(part.encode({0, 0})));
    CHECK(part.goal_regions().size() == 3);
  }
  SUBCASE("contained goal under-approximates") {
    const auto part = grid.label_regions({box({0, 0}, {1.5, 1})}, {});
    CHECK(part.goal_regions() == std::vector<RegionId>{part.encode({0, 0})});
  }
}

TEST_CASE("label_regions: 4x4 grid against an interval-overlap oracle") {
  const Partition grid(box({0, 0}, {4, 4}), {4, 4});
  const Box critical = box({1.5, 1.5}, {2.5, 2.5});
  const auto part = grid.label_regions({}, {critical});
  std::set<std::size_t> expected;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double ox = oracle::overlap(double(i), double(i + 1), 1.5, 2.5);
      const double oy = oracle::overlap(double(j), double(j + 1), 1.5, 2.5);
      if (ox > 0 && oy > 0) expected.insert(grid.encode({i, j}).value);
    }
  }
  CHECK(expected == std::set<std::size_t>{grid.encode({1, 1}).value, grid.encode({1, 2}).value,
                                          grid.encode({2, 1}).value, grid.encode({2, 2}).value});
  std::set<std::size_t> got;
  for (const auto r : part.critical_regions()) got.insert(r.value);
  CHECK(got == expected);
}

TEST_CASE("property: disjoint cover") {
  const Partition part(box({-3, 0, 1}, {5, 2, 1.7}), {5, 3, 4});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-3, 5), uy(0, 2), uz(1, 1.7);
  for (int i = 0; i < 10000; ++i) {
    const Vector x = vec({ux(rng), uy(rng), uz(rng)});
    const auto id = part.region_of(x);
    REQUIRE(id);
    const auto idx = oracle::locate(x, part.domain().lo, part.domain().hi, part.counts());
    REQUIRE(idx);
    CHECK(part.encode(*idx) == *id);
    const Box b = part.region_box(*id);
    CHECK(b.contains(x));
  }
}

TEST_CASE("property: label soundness under default modes") {
  const Partition grid(box({0, 0}, {10, 10}), {7, 9});
  const std::vector<Box> goals{box({6.1, 6.3}, {9.9, 10})};
  const std::vector<Box> obstacles{box({2.2, 3.3}, {4.1, 5.05}), box({0, 8.7}, {1.3, 9.1})};
  const auto part = grid.label_regions(goals, obstacles);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto r : part.goal_regions()) {
    const Box cell = part.region_box(r);
    for (int i = 0; i < 50; ++i) {
      const Vector x = cell.lo + (cell.hi - cell.lo).cwiseProduct(vec({u(rng), u(rng)}));
      bool in_goal = false;
      for (const auto& g : goals) in_goal = in_goal || g.contains(x);
      CHECK(in_goal);
    }
  }
  for (const auto& o : obstacles) {
    for (int i = 0; i < 500; ++i) {
      const Vector x = o.lo + (o.hi - o.lo).cwiseProduct(vec({u(rng), u(rng)}));
      const auto id = part.region_of(x);
      REQUIRE(id);
      // Points on a cell face may land in a neighbor that only touches the
      // obstacle; sampled points are interior almost surely.
      CHECK(part.is_critical(*id));
    }
  }
}

TEST_CASE("cells_touching: closed-box intersection") {
  const Partition grid(box({0, 0}, {4, 4}), {4, 4});
  CHECK(grid.cells_touching(box({1.5, 1.5}, {1.6, 1.6})).size() == 1);
  // A point on a shared corner touches four closed cells.
  CHECK(grid.cells_touching(box({2, 2}, {2, 2})).size() == 4);
  CHECK(grid.cells_touching(box({-5, -5}, {10, 10})).size() == 16);
  CHECK(grid.cells_touching(box({5, 5}, {6, 6})).empty());
}

TEST_CASE("partition: invalid construction") {
  CHECK_THROWS_AS(Partition(box({0, 0}, {0, 1}), {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Partition(box({0, 0}, {1, 1}), {1, 0}), InvalidArgument);
  CHECK_THROWS_AS(Partition(box({0, 0}, {1, 1}), {1}), InvalidArgument);
}
