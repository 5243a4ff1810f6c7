// Copyright 2026 The bsplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bsplan/kernels.hpp"
#include "oracles.hpp"

using namespace bsplan;

namespace
{

OccupancyGrid parse_text(const std::string & text, double res = 1.0)
{
  std::istringstream in(text);
  return load_grid(in, GridFormat::text, res);
}

// vertical wall at x in [10, 10.4) with an optional gap around y = 12.8
OccupancyGrid walled(bool gap)
{
  OccupancyGrid g(kDefaultGridCells, kDefaultGridCells);
  g.fill_box({10.0, 0.0}, {10.4, g.height_m()});
  if (gap) {
    for (int cy = 0; cy < g.height(); ++cy) {
      const double y = g.cell_center(0, cy).y;
      if (std::abs(y - 12.8) < 2.0) {
        for (int cx = 0; cx < g.width(); ++cx) {
          g.set(cx, cy, false);
        }
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("text grids")
{
  // first row is the top of the map
  const OccupancyGrid g = parse_text("#..\n...\n..#\n");
  CHECK(g.width() == 3);
  CHECK(g.height() == 3);
  CHECK(g.occupied(0, 2));
  CHECK(g.occupied(2, 0));
  CHECK_FALSE(g.occupied(1, 1));

  std::ostringstream out;
  write_grid(out, g, GridFormat::text);
  CHECK(parse_text(out.str()) == g);

  CHECK_THROWS_AS(parse_text("#..\n..\n"), ParseError);
  CHECK_THROWS_AS(parse_text("#x.\n"), ParseError);
}

TEST_CASE("pgm threshold")
{
  std::istringstream in("P2\n2 1\n255\n127 128\n");
  const OccupancyGrid g = load_grid(in, GridFormat::pgm);
  CHECK_FALSE(g.occupied(0, 0));
  CHECK(g.occupied(1, 0));

  OccupancyGrid z(128, 128);
  std::ostringstream bin;
  write_grid(bin, z, GridFormat::pgm);
  std::istringstream back(bin.str());
  const OccupancyGrid zz = load_grid(back, GridFormat::pgm);
  CHECK(zz == z);
  CHECK(std::none_of(zz.cells().begin(), zz.cells().end(), [](auto c) { return c != 0; }));

  std::istringstream bad("P2\n2 2\n255\n0 0 0\n");
  CHECK_THROWS_AS(load_grid(bad, GridFormat::pgm), ParseError);
  std::istringstream header("P7\n2 2\n255\n");
  CHECK_THROWS_AS(load_grid(header, GridFormat::pgm), ParseError);
  CHECK_THROWS_AS(load_grid_file("/nonexistent/map.pgm"), IoError);
}

TEST_CASE("footprint")
{
  VehicleParams v;
  v.rear_axle_offset = 1.0;
  const Footprint fp = footprint_at({0, 0}, 0.0, v);
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (const auto & c : fp.corners) {
    xmin = std::min(xmin, c.x);
    xmax = std::max(xmax, c.x);
    ymin = std::min(ymin, c.y);
    ymax = std::max(ymax, c.y);
  }
  CHECK(xmin == doctest::Approx(-1.0));
  CHECK(xmax == doctest::Approx(3.05));
  CHECK(ymin == doctest::Approx(-0.86));
  CHECK(ymax == doctest::Approx(0.86));

  const Footprint a = footprint_at({3, 4}, 0.7, v);
  const Footprint b = footprint_at({3, 4}, 0.7 + 2 * M_PI, v);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(norm(a.corners[i] - b.corners[i]) < 1e-12);
  }
  VehicleParams bad;
  bad.width = -1.0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("collision indicator")
{
  const VehicleParams v;
  OccupancyGrid g(kDefaultGridCells, kDefaultGridCells);
  CHECK(collision_indicator(footprint_at({12, 12}, 0.3, v), g) == 0);
  // beyond the border
  CHECK(collision_indicator(footprint_at({0.2, 12}, 0.0, v), g) == 1);
  CHECK(collision_indicator(footprint_at({24.0, 12}, 0.0, v), g) == 1);
  // one occupied cell under the front edge
  const auto [cx, cy] = g.cell_of({12 + 4.05 - 0.4 - 0.05, 12});
  g.set(cx, cy, true);
  CHECK(collision_indicator(footprint_at({12, 12}, 0.0, v), g) == 1);
  // more obstacles never clear a collision
  g.fill_box({5, 5}, {6, 6});
  CHECK(collision_indicator(footprint_at({12, 12}, 0.0, v), g) == 1);
}

TEST_CASE("checker agrees with the indicator")
{
  oracles::Rand r(4);
  const VehicleParams v;
  OccupancyGrid g(kDefaultGridCells, kDefaultGridCells);
  for (int k = 0; k < 12; ++k) {
    const Vec2 c{r.uniform(2, 23), r.uniform(2, 23)};
    g.fill_box(c, c + Vec2{r.uniform(0.2, 2.5), r.uniform(0.2, 2.5)});
  }
  g.fill_disc({12, 12}, 1.3);
  const CollisionChecker checker(g, v);
  int mismatches = 0;
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{r.uniform(-1, 26.6), r.uniform(-1, 26.6)};
    const double th = r.uniform(-4, 4);
    const bool a = checker.collides(p, th);
    const bool b = collision_indicator(footprint_at(p, th, v), g) == 1;
    const bool c = checker.collides_fixed_cost(p, th);
    mismatches += (a != b) + (c != b);
    hits += b;
  }
  CHECK(mismatches == 0);
  CHECK(hits > 1000);
}

TEST_CASE("distance fields")
{
  OccupancyGrid g(20, 10, 0.5);
  g.set(3, 4, true);
  const auto obs = DistanceField::to_obstacles(g);
  CHECK(obs.at(3, 4) == 0.0);
  CHECK(obs.at(6, 8) == doctest::Approx(2.5));
  const auto serial = DistanceField::to_obstacles(g, Exec::serial);
  CHECK(serial.values() == obs.values());
  const auto free = DistanceField::to_free(g);
  CHECK(free.at(3, 4) == doctest::Approx(0.5));
  CHECK(free.at(0, 0) == 0.0);
  const auto none = DistanceField::to_obstacles(OccupancyGrid(4, 4));
  CHECK(std::isinf(none.at(1, 1)));
  // bilinear between centers, outside adds the box distance
  CHECK(obs.interpolate(g.cell_center(6, 8)) == doctest::Approx(2.5));
  CHECK(obs.interpolate({-1.0, g.cell_center(3, 4).y}) == doctest::Approx(obs.at(0, 4) + 1.0));
}

TEST_CASE("distance to polyline")
{
  const ReferencePath seg{{{-1, 0}, {1, 0}}};
  CHECK(distance_to_polyline({0.3, 0}, seg) < 1e-12);
  Vec2 grad;
  CHECK(distance_to_polyline({0, 1}, seg, &grad) == doctest::Approx(1.0));
  CHECK(grad == Vec2{0, 1});
  CHECK(distance_to_polyline({2, 1}, seg, &grad) == doctest::Approx(std::sqrt(2.0)));
  CHECK(grad.x == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("reference paths")
{
  const VehicleParams v;
  const Configuration q0{3, 12.8, 0, 0};
  const Configuration qd{22, 12.8, 0, 0};
  const OccupancyGrid empty(kDefaultGridCells, kDefaultGridCells);
  const auto straight = reference_path(empty, q0, qd, v);
  REQUIRE(straight.has_value());
  CHECK(straight->polyline.front() == q0.position());
  CHECK(straight->polyline.back() == qd.position());
  for (const auto & p : straight->polyline) {
    CHECK(std::abs(p.y - 12.8) < 0.2);
  }

  const auto through = reference_path(walled(true), q0, {22, 4, 0, 0}, v);
  REQUIRE(through.has_value());
  // where the polyline crosses the wall line it is inside the gap
  int crossings = 0;
  const auto & pl = through->polyline;
  for (std::size_t i = 1; i < pl.size(); ++i) {
    if ((pl[i - 1].x - 10.2) * (pl[i].x - 10.2) <= 0.0 && pl[i].x != pl[i - 1].x) {
      const double t = (10.2 - pl[i - 1].x) / (pl[i].x - pl[i - 1].x);
      CHECK(std::abs(pl[i - 1].y + t * (pl[i].y - pl[i - 1].y) - 12.8) < 2.0);
      ++crossings;
    }
  }
  CHECK(crossings >= 1);

  CHECK_FALSE(reference_path(walled(false), q0, qd, v).has_value());
}

TEST_CASE("kernels serial and parallel agree bitwise")
{
  oracles::Rand r(12);
  OccupancyGrid g(kDefaultGridCells, kDefaultGridCells);
  for (int k = 0; k < 8; ++k) {
    const Vec2 c{r.uniform(2, 23), r.uniform(2, 23)};
    g.fill_disc(c, r.uniform(0.3, 1.5));
  }
  std::vector<double> a(g.cells().size());
  std::vector<double> b(g.cells().size());
  kernels::serial::squared_edt(g.cells(), g.width(), g.height(), a);
  kernels::omp::squared_edt(g.cells(), g.width(), g.height(), b);
  CHECK(a == b);

  const CollisionChecker checker(g, VehicleParams{});
  std::vector<Vec2> pos(2000);
  std::vector<double> head(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos[i] = {r.uniform(0, 25.6), r.uniform(0, 25.6)};
    head[i] = r.uniform(-3.2, 3.2);
  }
  std::vector<std::uint8_t> fa(pos.size());
  std::vector<std::uint8_t> fb(pos.size());
  kernels::serial::collision_flags(checker, pos, head, fa);
  kernels::omp::collision_flags(checker, pos, head, fb);
  CHECK(fa == fb);
  kernels::omp::collision_flags(checker, pos, head, fb, CheckMode::fixed_cost);
  CHECK(fa == fb);
}
