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

#include "bsplan/suite.hpp"
#include "oracles.hpp"

using namespace bsplan;

namespace
{

// two samples on the x-axis, the second one colliding
PathSamples two_samples(double spacing)
{
  PathSamples s;
  s.positions = {{5, 5}, {5 + spacing, 5}};
  s.first_deriv = {{1, 0}, {1, 0}};
  s.second_deriv = {{0, 0}, {0, 0}};
  s.curvature = {0, 0};
  s.seg_lengths = {0, spacing};
  s.degenerate = {0, 0};
  return s;
}

CollisionTarget unit_target()
{
  CollisionTarget t;
  t.custom = [](const Vec2 &, Vec2 * g) {
    if (g != nullptr) {
      *g = Vec2{};
    }
    return 1.0;
  };
  return t;
}

}  // namespace

TEST_CASE("curvature hinge")
{
  const std::vector<double> zero(1024, 0.0);
  CHECK(curvature_loss(zero, 0.227) == 0.0);

  const std::vector<double> high(1024, 0.5);
  CHECK(std::abs(curvature_loss(high, 0.227) - 279.552) < 1e-9);

  std::vector<double> one(100, 0.1);
  one[40] = -0.3;
  std::vector<double> grad(one.size(), 7.0);
  CHECK(std::abs(curvature_loss(one, 0.227, grad) - 0.073) < 1e-9);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    CHECK(grad[i] == (i == 40 ? -1.0 : 0.0));
  }
}

TEST_CASE("total variation of curvature")
{
  const std::vector<double> flat(50, 0.13);
  CHECK(total_curvature_loss(flat) == 0.0);
  const std::vector<double> bump{0.0, 0.1, 0.0};
  std::vector<double> grad(3);
  CHECK(std::abs(total_curvature_loss(bump, grad) - 0.2) < 1e-12);
  CHECK(grad == std::vector<double>{-1.0, 2.0, -1.0});
  for (std::size_t n : {2u, 17u, 1024u}) {
    std::vector<double> ramp(n);
    for (std::size_t i = 0; i < n; ++i) {
      ramp[i] = 0.2 * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    CHECK(std::abs(total_curvature_loss(ramp) - 0.2) < 1e-9);
  }
}

TEST_CASE("collision loss arithmetic")
{
  const VehicleParams v;
  const PathSamples s = two_samples(0.05);
  const std::vector<double> heads{0.0, 0.0};
  const std::vector<std::uint8_t> hit{0, 1};
  CHECK(std::abs(collision_loss(s, heads, hit, v, unit_target()) - 0.25) < 1e-9);

  // the first sample never contributes
  const std::vector<std::uint8_t> both{1, 1};
  CHECK(std::abs(collision_loss(s, heads, both, v, unit_target()) - 0.25) < 1e-9);

  // doubling the segment length doubles the contribution
  CHECK(std::abs(collision_loss(two_samples(0.1), heads, hit, v, unit_target()) - 0.5) < 1e-9);

  const std::vector<std::uint8_t> none{0, 0};
  CHECK(collision_loss(s, heads, none, v, unit_target()) == 0.0);
}

TEST_CASE("straight path in an empty map")
{
  const PlanningContext ctx = oracles::make_context(oracles::empty_grid(), {3, 12.8, 0, 0}, {21, 12.8, 0, 0});
  const PathModel model = make_path_model(3);
  const LatentEvaluation e = evaluate_latent(model, ctx, LatentParams::zeros(3), LossConfig{}, true);
  CHECK(e.path.loss.curv == 0.0);
  CHECK(e.path.loss.coll == 0.0);
  CHECK(e.path.loss.sigma_tcurv == 1);
  CHECK(e.path.loss.total == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.path.verdict.feasible);
  CHECK(collision_loss(e.path.samples, *ctx.checker, collision_target(ctx)) == 0.0);
}

TEST_CASE("gate and verdict on a sharp turn")
{
  // a goal straight to the side forces curvature above the limit
  const PlanningContext ctx = oracles::make_context(oracles::empty_grid(), {10, 10, 0, 0}, {12, 14, M_PI, 0});
  const PathModel model = make_path_model(3);
  const LatentEvaluation e = evaluate_latent(model, ctx, LatentParams::zeros(3), LossConfig{}, false);
  CHECK(e.path.loss.curv > 0.0);
  CHECK(e.path.loss.sigma_tcurv == 0);
  CHECK(e.path.loss.total == doctest::Approx(e.path.loss.curv + e.path.loss.coll));
  CHECK_FALSE(e.path.verdict.curvature_ok);
  CHECK_FALSE(e.path.verdict.feasible);
}

TEST_CASE("feasibility thresholds")
{
  PathSamples s = two_samples(0.05);
  s.curvature = {0.0, 0.3};
  const std::vector<std::uint8_t> clear{0, 0};
  const FeasibilityVerdict v = feasibility(s, clear, 0.227);
  CHECK_FALSE(v.curvature_ok);
  CHECK(v.collision_free);
  CHECK(v.max_abs_curvature == doctest::Approx(0.3));

  s.curvature = {0.0, 0.1};
  const std::vector<std::uint8_t> clipped{0, 1};
  const FeasibilityVerdict w = feasibility(s, clipped, 0.227);
  CHECK(w.curvature_ok);
  CHECK_FALSE(w.collision_free);
  CHECK_FALSE(w.feasible);

  // a wall just clipping the path at one sample
  auto grid = oracles::empty_grid();
  grid->fill_box({15.0, 13.6}, {15.2, 14.0});
  const PlanningContext ctx = oracles::make_context(grid, {3, 12.8, 0, 0}, {21, 12.8, 0, 0});
  const PathModel model = make_path_model(3);
  const LatentEvaluation e = evaluate_latent(model, ctx, LatentParams::zeros(3), LossConfig{}, false);
  CHECK_FALSE(e.path.verdict.collision_free);
  CHECK(e.path.verdict.curvature_ok);
  CHECK(e.path.loss.coll > 0.0);
}

TEST_CASE("latent gradient against finite differences")
{
  const ScenarioSuite suite = generate_suite("mixed", 10, 31);
  const auto ctxs = prepare_suite(suite, VehicleParams{});
  const auto rep = oracles::gradient_suite(ctxs, 20, 5);
  CHECK(rep.gate_violations == 0);
  CHECK(rep.passed >= 18);
  for (const auto & f : rep.failures) {
    INFO(f.scenario << " rel " << f.relative_error);
    CHECK_FALSE(f.kink.empty());
  }
}
