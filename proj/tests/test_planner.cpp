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

#include "bsplan/suite.hpp"
#include "bsplan/train.hpp"
#include "oracles.hpp"

using namespace bsplan;

namespace
{

std::shared_ptr<OccupancyGrid> corridor_grid(double yc = 12.8)
{
  auto g = oracles::empty_grid();
  g->fill_box({0, 0}, {25.6, yc - 3.0});
  g->fill_box({0, yc + 3.0}, {25.6, 25.6});
  return g;
}

}  // namespace

TEST_CASE("aligned corridor is solved at the first iterate")
{
  const PlanningContext ctx = oracles::make_context(corridor_grid(), {2, 12.8, 0, 0}, {21, 12.8, 0, 0});
  const PlanResult r = plan_gradient_descent(ctx, make_path_model(3));
  CHECK(r.verdict.feasible);
  CHECK(r.iterations == 0);
  for (double v : r.phi.phi) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("open map lane change")
{
  // 32 m map: at x = 23 the front bumper would leave the default 25.6 m one
  const PlanningContext ctx = oracles::make_context(oracles::empty_grid(160), {2, 12.8, 0, 0}, {23, 18, 0, 0});
  const PathModel model = make_path_model(3);
  const PlanResult r = plan_gradient_descent(ctx, model);
  REQUIRE(r.verdict.feasible);
  CHECK(r.verdict.max_abs_curvature <= 0.227);
  const auto check =
    verify_independent(r.polygon, model.knots, kDefaultSamples, ctx.grid(), ctx.vehicle);
  CHECK(check.feasible);

  // same problem, same answer
  GradientDescentConfig serial;
  serial.exec = Exec::serial;
  const PlanResult again = plan_gradient_descent(ctx, model, serial);
  CHECK(again.phi.phi == r.phi.phi);
  CHECK(again.iterations == r.iterations);
}

TEST_CASE("walled off goal stays infeasible")
{
  auto g = oracles::empty_grid();
  g->fill_box({14, 0}, {15, 25.6});
  const PlanningContext ctx = oracles::make_context(g, {3, 12.8, 0, 0}, {22, 12.8, 0, 0});
  CHECK_FALSE(ctx.reference.has_value());
  GradientDescentConfig cfg;
  cfg.max_iterations = 60;
  const PlanResult r = plan_gradient_descent(ctx, make_path_model(3), cfg);
  CHECK_FALSE(r.verdict.feasible);
  CHECK(r.iterations == 60);
  CHECK(norm(r.samples.positions.back() - ctx.scenario.qd.position()) < 1e-9);
}

TEST_CASE("neural plans reach the goal exactly")
{
  const auto suite = generate_suite("mixed", 4, 2);
  const auto ctxs = prepare_suite(suite, VehicleParams{});
  const NetworkModel net = NetworkModel::random(NetworkShape{}, VehicleParams{}, 4, 1.0);
  const PathModel model = make_path_model(3);
  for (const auto & ctx : ctxs) {
    const PlanResult r = plan_neural(net, ctx, model);
    CHECK(norm(r.samples.positions.front() - ctx.scenario.q0.position()) < 1e-9);
    CHECK(norm(r.samples.positions.back() - ctx.scenario.qd.position()) < 1e-9);
    CHECK(r.iterations == 0);
  }
}

TEST_CASE("training on corridors")
{
  // aligned straight corridors: the untrained network is already feasible
  std::vector<PlanningContext> ctxs;
  oracles::Rand r(6);
  for (int i = 0; i < 20; ++i) {
    const double yc = r.uniform(5.0, 20.0);
    ctxs.push_back(
      oracles::make_context(corridor_grid(yc), {r.uniform(1.0, 4.0), yc, 0, 0}, {r.uniform(15.0, 21.0), yc, 0, 0}));
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  const NetworkModel init = NetworkModel::random(NetworkShape{}, VehicleParams{}, 1, 0.01);
  const TrainResult a = train(init, ctxs, cfg);
  REQUIRE(a.history.size() == 3);
  CHECK(a.history[0].epoch == 0);
  CHECK(a.history[0].train_accuracy == 100.0);
  CHECK(a.history[0].val_accuracy == 100.0);

  const TrainResult b = train(init, ctxs, cfg);
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].val_loss == b.history[e].val_loss);
  }
  CHECK(a.model == b.model);

  // serial and parallel reductions agree bit for bit
  TrainConfig serial = cfg;
  serial.parallel = false;
  const TrainResult c = train(init, ctxs, serial);
  CHECK(c.model == a.model);
}

TEST_CASE("training rejects bad settings")
{
  const auto ctxs = prepare_suite(generate_suite("empty", 4, 1), VehicleParams{});
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train(NetworkModel::random(NetworkShape{}, VehicleParams{}, 1), ctxs, cfg), ContractError);
  cfg.batch_size = 4;
  cfg.depth = 2;
  CHECK_THROWS_AS(train(NetworkModel::random(NetworkShape{}, VehicleParams{}, 1), ctxs, cfg), ContractError);
}

TEST_CASE("seeded permutation")
{
  const auto p = seeded_permutation(50, 7);
  CHECK(p == seeded_permutation(50, 7));
  CHECK(p != seeded_permutation(50, 8));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    CHECK(sorted[i] == i);
  }
}
