#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fpm/geometry.hpp"

using namespace fpm;

TEST_CASE("generate_grid_points lattice centers") {
  auto pc = generate_grid_points(2, 2, Rect{0, 0, 1, 1});
  REQUIRE(pc.coords.size() == 4);
  CHECK(pc.coords[0].isApprox(Vec2(0.25, 0.25)));
  CHECK(pc.coords[1].isApprox(Vec2(0.75, 0.25)));
  CHECK(pc.coords[2].isApprox(Vec2(0.25, 0.75)));
  CHECK(pc.coords[3].isApprox(Vec2(0.75, 0.75)));
}

TEST_CASE("generate_grid_points rejects degenerate input") {
  CHECK_THROWS_AS(generate_grid_points(1, 4, Rect{0, 0, 1, 1}), Error);
  CHECK_THROWS_AS(generate_grid_points(2, 2, Rect{0, 0, 0, 1}), Error);
}

TEST_CASE("generate_grid_points matches the 1260-point count") {
  auto pc = generate_grid_points(36, 35, Rect{0, 0, 10e-6, 10e-6});
  CHECK(pc.coords.size() == 1260);
}

TEST_CASE("voronoi of quadrant centers gives four square cells") {
  auto pc = generate_grid_points(2, 2, Rect{0, 0, 1, 1});
  auto part = partition_voronoi(pc);
  REQUIRE(part.cells.size() == 4);
  for (const auto& c : part.cells) {
    CHECK(c.area == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(c.polygon.size() == 4);
  }
  int internal = 0;
  for (const auto& e : part.edges)
    if (e.kind == EdgeKind::Internal) {
      ++internal;
      // all internal edges meet at the domain center
      const bool touches_center =
          (e.a - Vec2(0.5, 0.5)).norm() < 1e-12 || (e.b - Vec2(0.5, 0.5)).norm() < 1e-12;
      CHECK(touches_center);
    }
  CHECK(internal == 4);
}

TEST_CASE("voronoi rejects degenerate input") {
  PointCloud pc;
  pc.domain_outline = Rect{0, 0, 1, 1}.outline();
  pc.coords = {Vec2(0.2, 0.2), Vec2(0.8, 0.8)};
  CHECK_THROWS_AS(partition_voronoi(pc), Error);
  pc.coords = {Vec2(0.2, 0.2), Vec2(0.5, 0.5), Vec2(0.8, 0.8)};
  CHECK_THROWS_AS(partition_voronoi(pc), Error);
}

TEST_CASE("voronoi of random points tiles the domain") {
  PointCloud pc;
  pc.domain_outline = Rect{0, 0, 1, 1}.outline();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(0.02, 0.98);
  for (int i = 0; i < 50; ++i) pc.coords.emplace_back(dist(rng), dist(rng));
  auto part = partition_voronoi(pc);
  double sum = 0;
  for (const auto& c : part.cells) {
    sum += c.area;
    CHECK(point_in_polygon(part.point(c.point_id), c.polygon));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("voronoi edge normals point from left generator to right generator") {
  PointCloud pc;
  pc.domain_outline = Rect{0, 0, 1, 1}.outline();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int i = 0; i < 40; ++i) pc.coords.emplace_back(dist(rng), dist(rng));
  auto part = partition_voronoi(pc);
  std::set<std::pair<int, int>> seen;
  for (const auto& e : part.edges) {
    if (e.kind != EdgeKind::Internal) continue;
    const Vec2 d = part.point(e.right_cell) - part.point(e.left_cell);
    CHECK(e.normal.dot(d.normalized()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e.h_e == doctest::Approx(d.norm()));
    // each internal edge appears exactly once
    auto key = std::minmax(e.left_cell, e.right_cell);
    CHECK(!seen.count({key.first, key.second}));
    seen.insert({key.first, key.second});
  }
}

TEST_CASE("quadrilateral partition on the unit square") {
  auto part = partition_quadrilateral(2, 2, Rect{0, 0, 1, 1});
  REQUIRE(part.cells.size() == 4);
  for (const auto& c : part.cells) CHECK(c.area == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(part.point(0).isApprox(Vec2(0.25, 0.25), 1e-12));
  CHECK(part.point(3).isApprox(Vec2(0.75, 0.75), 1e-12));
}

TEST_CASE("quadrilateral partition clipped to a trapezoid") {
  // truncated-pyramid style outline: wide base, narrow top
  Polygon trap = {Vec2(-1.5, 0), Vec2(1.5, 0), Vec2(0.5, 1), Vec2(-0.5, 1)};
  auto part = partition_quadrilateral(6, 4, trap);
  double sum = 0;
  for (const auto& c : part.cells) {
    sum += c.area;
    CHECK(c.point_id == c.cell_id);
    // internal point is the centroid of the clipped polygon
    CHECK((part.point(c.point_id) - polygon_centroid(c.polygon)).norm() < 1e-14);
  }
  CHECK(sum == doctest::Approx(polygon_area(trap)).epsilon(1e-10));
}

TEST_CASE("quadrilateral partition rejects non-convex outlines") {
  Polygon ell = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)};
  CHECK_THROWS_AS(partition_quadrilateral(4, 4, ell), Error);
}

TEST_CASE("supports on a uniform quad grid") {
  auto part = partition_quadrilateral(8, 8, Rect{0, 0, 1, 1});
  auto sup = build_supports(part);

  // interior point: 4 edge neighbors + 8 second neighbors
  const int c = 3 * 8 + 3;
  CHECK(sup[c].m() == 12);
  // support members are sorted and exclude the center
  CHECK(std::is_sorted(sup[c].members.begin(), sup[c].members.end()));
  CHECK(!std::count(sup[c].members.begin(), sup[c].members.end(), c));

  // corner cell reaches into the third ring (and beyond, until m >= 10)
  CHECK(sup[0].m() >= 10);
  CHECK(std::count(sup[0].members.begin(), sup[0].members.end(), 3 * 8) > 0); // (0,3)

  // support symmetry on the nearest ring
  for (int i = 0; i < part.n_points(); ++i)
    for (int nb : part.neighbors[size_t(i)]) {
      const auto& back = part.neighbors[size_t(nb)];
      CHECK(std::count(back.begin(), back.end(), i) == 1);
    }
}

TEST_CASE("supports fail on a 2x2 grid") {
  auto part = partition_quadrilateral(2, 2, Rect{0, 0, 1, 1});
  CHECK_THROWS_AS(build_supports(part), Error);
}

TEST_CASE("edge_h definitions") {
  auto part = partition_quadrilateral(4, 4, Rect{0, 0, 1, 1});
  for (const auto& e : part.edges) {
    if (e.kind == EdgeKind::Internal) {
      CHECK(edge_h(e, part) ==
            doctest::Approx((part.point(e.right_cell) - part.point(e.left_cell)).norm()));
      CHECK(e.h_e == doctest::Approx(0.25)); // lattice spacing
    } else {
      CHECK(e.h_e == doctest::Approx(0.125)); // centroid to boundary: half spacing
    }
  }
}

TEST_CASE("mapped grid partition of a trapezoid") {
  const int nx = 6, ny = 4;
  Polygon trap = {Vec2(-1.5, 0), Vec2(1.5, 0), Vec2(0.5, 1), Vec2(-0.5, 1)};
  std::vector<Vec2> corners;
  for (int j = 0; j <= ny; ++j) {
    const double eta = double(j) / ny;
    const Vec2 left = (1 - eta) * Vec2(-1.5, 0) + eta * Vec2(-0.5, 1);
    const Vec2 right = (1 - eta) * Vec2(1.5, 0) + eta * Vec2(0.5, 1);
    for (int i = 0; i <= nx; ++i) corners.push_back(left + (right - left) * (double(i) / nx));
  }
  auto part = partition_mapped_grid(nx, ny, corners, trap);
  REQUIRE(part.cells.size() == size_t(nx * ny));
  double sum = 0;
  for (const auto& c : part.cells) sum += c.area;
  CHECK(sum == doctest::Approx(polygon_area(trap)).epsilon(1e-12));

  // boundary ids: bottom 0, right 1, top 2, left 3
  for (const auto& e : part.edges)
    if (e.kind == EdgeKind::External) {
      CHECK(e.boundary_id >= 0);
      CHECK(e.boundary_id <= 3);
      if (e.boundary_id == 0) CHECK(std::abs(e.normal.y() + 1.0) < 1e-12);
      if (e.boundary_id == 2) CHECK(std::abs(e.normal.y() - 1.0) < 1e-12);
    }
}

TEST_CASE("partitions are deterministic") {
  PointCloud pc;
  pc.domain_outline = Rect{0, 0, 1, 1}.outline();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int i = 0; i < 60; ++i) pc.coords.emplace_back(dist(rng), dist(rng));
  auto a = partition_voronoi(pc);
  auto b = partition_voronoi(pc);
  REQUIRE(a.edges.size() == b.edges.size());
  for (size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].left_cell == b.edges[i].left_cell);
    CHECK(a.edges[i].right_cell == b.edges[i].right_cell);
    CHECK(a.edges[i].a == b.edges[i].a);
    CHECK(a.edges[i].b == b.edges[i].b);
  }
}
