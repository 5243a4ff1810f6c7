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

#include <cmath>

#include "oracles.hpp"

using namespace bsplan;

namespace
{

std::vector<TreeNode> nodes(int depth) { return tree_layout(depth).nodes; }

// q0 and qd placed so that p2 = (0, 0) and p_{N-2} = (8, 0)
ControlPolygon chord_polygon(int depth, const LatentParams & phi)
{
  BuilderConfig cfg;
  cfg.start_scale = 1.0;
  cfg.goal_scale = 1.0;
  const KnotVector k = make_knots(spline_degree(depth), num_control_points(depth));
  return build_polygon({-2, 0, 0, 0}, {9, 0, 0, 0}, phi, k, cfg);
}

void set_pair(LatentParams & phi, std::size_t index, double x, double y)
{
  phi.phi[latent_offset(index)] = x;
  phi.phi[latent_offset(index) + 1] = y;
}

}  // namespace

TEST_CASE("tree layouts")
{
  CHECK(nodes(1) == std::vector<TreeNode>{{3, 2, 4}});
  CHECK(num_control_points(1) == 6);
  CHECK(nodes(2) == std::vector<TreeNode>{{4, 2, 6}, {3, 2, 4}, {5, 4, 6}});
  CHECK(num_control_points(2) == 8);
  CHECK(nodes(3) == std::vector<TreeNode>{{6, 2, 10}, {4, 2, 6}, {8, 6, 10}, {3, 2, 4}, {5, 4, 6}, {7, 6, 8},
                                          {9, 8, 10}});
  CHECK(num_control_points(3) == 12);
  CHECK(num_latent(4) == 30);
  CHECK(spline_degree(1) == 5);
  CHECK(spline_degree(3) == 7);
  CHECK_THROWS_AS(tree_layout(0), ContractError);
}

TEST_CASE("place point")
{
  CHECK(place_point({0, 0}, {8, 0}, 0, 0) == Vec2{4, 0});
  CHECK(place_point({0, 0}, {8, 0}, 1, 0.5) == Vec2{8, 2});
  CHECK(place_point({-2, 3}, {2, -1}, -1, -1) == Vec2{-2, -1});
  CHECK(place_point({1, 1}, {1, 1}, 1, -1) == Vec2{1, 1});
}

TEST_CASE("two level worked example")
{
  LatentParams phi = LatentParams::zeros(2);
  set_pair(phi, 4, 1.0, 0.5);
  const ControlPolygon p = chord_polygon(2, phi);
  CHECK(p[2] == Vec2{0, 0});
  CHECK(p[6] == Vec2{8, 0});
  CHECK(p[4] == Vec2{8, 2});
  CHECK(p[3] == Vec2{4, 1});
  CHECK(p[5] == Vec2{8, 1});
}

TEST_CASE("three level worked example")
{
  LatentParams phi = LatentParams::zeros(3);
  set_pair(phi, 6, 1.0, 0.5);
  const ControlPolygon p = chord_polygon(3, phi);
  CHECK(p[2] == Vec2{0, 0});
  CHECK(p[10] == Vec2{8, 0});
  CHECK(p[6] == Vec2{8, 2});
  CHECK(p[4] == Vec2{4, 1});
  CHECK(p[8] == Vec2{8, 1});
  CHECK(p[3] == Vec2{2, 0.5});
  CHECK(p[5] == Vec2{6, 1.5});
  CHECK(p[7] == Vec2{8, 1.5});
  CHECK(p[9] == Vec2{8, 0.5});
}

TEST_CASE("zero latent collapses to midpoints")
{
  for (int d = 1; d <= 5; ++d) {
    CHECK(oracles::midpoint_collapse(d, 100 + static_cast<std::uint64_t>(d)));
  }
}

TEST_CASE("straight boundary gives a straight path")
{
  BuilderConfig cfg;
  cfg.start_scale = 1.0;
  cfg.goal_scale = 1.0;
  const PathModel model = make_path_model(3);
  const ControlPolygon p = build_polygon({0, 0, 0, 0}, {10, 0, 0, 0}, LatentParams::zeros(3), model.knots, cfg);
  CHECK(p[0] == Vec2{0, 0});
  CHECK(p[1] == Vec2{1, 0});
  CHECK(p[2].y == 0.0);
  CHECK(p[10] == Vec2{9, 0});
  CHECK(p[11] == Vec2{10, 0});
  for (const auto & q : p) {
    CHECK(q.y == 0.0);
  }
  const PathSamples s = model.sampler->sample(p);
  for (double k : s.curvature) {
    CHECK(std::abs(k) < 1e-12);
  }
}

TEST_CASE("initial curvature is reproduced")
{
  const PathModel model = make_path_model(3);
  const Configuration q0{0, 0, 0, 0.227};
  const Configuration qd{10, 10, M_PI / 2, 0};
  const ControlPolygon p = build_polygon(q0, qd, LatentParams::zeros(3), model.knots);
  const PathSamples s = model.sampler->sample(p);
  CHECK(std::abs(s.curvature[0] - 0.227) < 1e-6);
  const double h = 1e-5;
  const double fd = oracles::three_point_curvature(
    evaluate(p, model.knots, 0.0), evaluate(p, model.knots, h), evaluate(p, model.knots, 2 * h));
  CHECK(std::abs(fd - 0.227) < 1e-3);
}

TEST_CASE("boundary exactness on random triples")
{
  const auto rep = oracles::boundary_exactness(300, 3);
  CHECK(rep.max_position_error < 1e-9);
  CHECK(rep.max_heading_error < 1e-9);
  CHECK(rep.max_kappa_error < 1e-6);
}

TEST_CASE("coincident endpoints and bad latents are rejected")
{
  const PathModel model = make_path_model(2);
  CHECK_THROWS_AS(build_polygon({1, 1, 0, 0}, {1, 1, 1, 0}, LatentParams::zeros(2), model.knots), DegenerateProblem);
  CHECK_THROWS_AS(build_polygon({0, 0, 0, 0}, {5, 1, 0, 0}, LatentParams::zeros(3), model.knots), ContractError);
  LatentParams bad = LatentParams::zeros(2);
  bad.phi[0] = 1.5;
  CHECK_THROWS_AS(build_polygon({0, 0, 0, 0}, {5, 1, 0, 0}, bad, model.knots), ContractError);
}

TEST_CASE("tree points stay in their squares")
{
  oracles::Rand r(9);
  const PathModel model = make_path_model(4, 32);
  for (int t = 0; t < 50; ++t) {
    LatentParams phi = LatentParams::zeros(4);
    for (double & v : phi.phi) {
      v = r.uniform(-1, 1);
    }
    const ControlPolygon p =
      build_polygon({r.uniform(0, 5), r.uniform(0, 5), r.uniform(-3, 3), 0.1}, {20, 10, 1, 0}, phi, model.knots);
    for (const auto & n : model.layout.nodes) {
      const Vec2 mid = 0.5 * (p[n.left] + p[n.right]);
      const double half = 0.5 * std::max(std::abs(p[n.left].x - p[n.right].x), std::abs(p[n.left].y - p[n.right].y));
      CHECK(std::abs(p[n.index].x - mid.x) <= half + 1e-12);
      CHECK(std::abs(p[n.index].y - mid.y) <= half + 1e-12);
    }
  }
}

TEST_CASE("jacobian")
{
  SUBCASE("single node")
  {
    const PathModel model = make_path_model(1);
    const Configuration q0{0, 0, 0, 0};
    const Configuration qd{10, 3, 0.5, 0};
    const LatentParams phi{1, {0.3, -0.2}};
    const ControlPolygon p = build_polygon(q0, qd, phi, model.knots);
    const double d = std::max(std::abs(p[2].x - p[4].x), std::abs(p[2].y - p[4].y));
    const PolygonJacobian j = polygon_gradient(q0, qd, phi, model.knots);
    CHECK(j(6, 0) == doctest::Approx(d / 2));
    CHECK(j(7, 0) == 0.0);
    CHECK(j(6, 1) == 0.0);
    CHECK(j(7, 1) == doctest::Approx(d / 2));
  }

  SUBCASE("matches finite differences and leaves are local")
  {
    oracles::Rand r(21);
    for (int depth = 2; depth <= 4; ++depth) {
      const PathModel model = make_path_model(depth, 16);
      const Configuration q0{1, 2, 0.3, 0.1};
      const Configuration qd{17, 9, -0.4, 0};
      LatentParams phi = LatentParams::zeros(depth);
      for (double & v : phi.phi) {
        v = r.uniform(-0.8, 0.8);
      }
      const PolygonJacobian j = polygon_gradient(q0, qd, phi, model.knots);
      const double h = 1e-6;
      double worst = 0.0;
      for (std::size_t c = 0; c < phi.phi.size(); ++c) {
        LatentParams a = phi;
        LatentParams b = phi;
        a.phi[c] += h;
        b.phi[c] -= h;
        const ControlPolygon pa = build_polygon(q0, qd, a, model.knots);
        const ControlPolygon pb = build_polygon(q0, qd, b, model.knots);
        for (std::size_t i = 0; i < pa.size(); ++i) {
          const double fx = (pa[i].x - pb[i].x) / (2 * h);
          const double fy = (pa[i].y - pb[i].y) / (2 * h);
          worst = std::max(worst, std::abs(fx - j(2 * i, c)) / std::max(1.0, std::abs(fx)));
          worst = std::max(worst, std::abs(fy - j(2 * i + 1, c)) / std::max(1.0, std::abs(fy)));
        }
      }
      CHECK(worst < 1e-5);

      // the last 2^(depth-1) nodes are leaves
      const auto & ns = model.layout.nodes;
      for (std::size_t n = ns.size() / 2; n < ns.size(); ++n) {
        const std::size_t col = latent_offset(ns[n].index);
        for (std::size_t row = 0; row < 2 * model.num_points(); ++row) {
          if (row / 2 != ns[n].index) {
            CHECK(j(row, col) == 0.0);
            CHECK(j(row, col + 1) == 0.0);
          }
        }
      }
    }
  }
}
