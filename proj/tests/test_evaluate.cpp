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

#include <filesystem>
#include <sstream>

#include "bsplan/render.hpp"
#include "bsplan/suite.hpp"
#include "oracles.hpp"

using namespace bsplan;

namespace
{

std::string csv(const MetricsReport & r, bool timing)
{
  std::ostringstream out;
  write_report_csv(out, r, timing);
  return out.str();
}

std::size_t count(const std::string & s, const std::string & needle)
{
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("planner names")
{
  CHECK(parse_planner("gd") == PlannerKind::gradient_descent);
  CHECK(parse_planner("neural") == PlannerKind::neural);
  CHECK(planner_name(parse_planner(planner_name(PlannerKind::neural))) == planner_name(PlannerKind::neural));
  CHECK_THROWS(parse_planner("rrt"));
}

TEST_CASE("summaries are functions of the rows")
{
  std::vector<ScenarioRow> rows(4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].verdict.feasible = i != 2;
    rows[i].verdict.max_abs_curvature = 0.1 * static_cast<double>(i + 1);
    rows[i].time_ms = static_cast<double>(i + 1);
  }
  const MetricsReport r = summarize("gd", 3, rows);
  CHECK(r.total == 4);
  CHECK(r.feasible == 3);
  CHECK(r.accuracy == doctest::Approx(75.0));
  CHECK(r.mean_time_ms == doctest::Approx(2.5));
  CHECK(r.mean_max_kappa == doctest::Approx((0.1 + 0.2 + 0.4) / 3));
}

TEST_CASE("empty map suite is fully solved and reports repeat")
{
  const auto ctxs = prepare_suite(generate_suite("empty", 6, 5), VehicleParams{});
  EvaluateOptions opts;
  opts.timing_repeats = 1;
  std::vector<PlanResult> results;
  const MetricsReport a = evaluate(ctxs, opts, &results);
  CHECK(a.accuracy == 100.0);
  REQUIRE(results.size() == 6);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(a.rows[i].id == ctxs[i].scenario.id);
    CHECK(a.rows[i].path_length > 0.0);
  }
  opts.parallel = false;
  const MetricsReport b = evaluate(ctxs, opts);
  CHECK(csv(a, false) == csv(b, false));
  const std::string text = csv(a, true);
  CHECK(text.rfind("# planner=", 0) == 0);
  CHECK(count(text, "\n") == 8);
  CHECK(text.find("time_ms") != std::string::npos);
  CHECK(csv(a, false).find("time_ms") == std::string::npos);
  CHECK_FALSE(format_report_table(a).empty());
}

TEST_CASE("independent verification")
{
  const PathModel model = make_path_model(3);
  auto g = oracles::empty_grid();
  const Configuration q0{3, 12.8, 0, 0};
  const Configuration qd{21, 12.8, 0, 0};
  const ControlPolygon straight = build_polygon(q0, qd, LatentParams::zeros(3), model.knots);
  CHECK(verify_independent(straight, model.knots, kDefaultSamples, *g, VehicleParams{}).feasible);

  g->fill_box({10, 12}, {11, 13});
  const auto blocked = verify_independent(straight, model.knots, kDefaultSamples, *g, VehicleParams{});
  CHECK_FALSE(blocked.collision_free);
  CHECK(blocked.curvature_ok);

  const ControlPolygon sharp =
    build_polygon({10, 10, 0, 0}, {12, 14, 3.14159, 0}, LatentParams::zeros(3), model.knots);
  CHECK_FALSE(verify_independent(sharp, model.knots, kDefaultSamples, *oracles::empty_grid(), VehicleParams{})
                .curvature_ok);
}

TEST_CASE("neural evaluation needs a model")
{
  const auto ctxs = prepare_suite(generate_suite("empty", 2, 5), VehicleParams{});
  EvaluateOptions opts;
  opts.planner = PlannerKind::neural;
  CHECK_THROWS_AS(evaluate(ctxs, opts), ContractError);
}

TEST_CASE("depth ablation")
{
  const auto ctxs = prepare_suite(generate_suite("mixed", 4, 9), VehicleParams{});
  AblationOptions opts;
  opts.depths = {1, 2, 3};
  opts.train.epochs = 0;
  opts.evaluate.timing_repeats = 1;
  const auto rows = ablate_depth(ctxs, opts);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].depth == opts.depths[i]);
    CHECK(rows[i].report.total == 4);
  }
  std::ostringstream a;
  std::ostringstream b;
  write_ablation_csv(a, rows, false);
  write_ablation_csv(b, ablate_depth(ctxs, opts), false);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("depth,planner,control_points", 0) == 0);
  CHECK_FALSE(format_ablation_table(rows).empty());
}

TEST_CASE("svg rendering")
{
  const PathModel model = make_path_model(3);
  auto g = oracles::empty_grid();
  g->fill_box({0, 0}, {25.6, 9.8});
  g->fill_box({0, 15.8}, {25.6, 25.6});
  const PlanningContext ctx = oracles::make_context(g, {2, 12.8, 0, 0}, {21, 12.8, 0, 0});
  const PlanResult ok = plan_gradient_descent(ctx, model);
  std::ostringstream a;
  render_svg(a, ok, ctx, model);
  const std::string svg = a.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  std::ostringstream again;
  render_svg(again, ok, ctx, model);
  CHECK(again.str() == svg);

  // infeasible plans mark their violating samples
  auto wall = oracles::empty_grid();
  wall->fill_box({10, 12}, {11, 14});
  const PlanningContext bad = oracles::make_context(wall, {2, 12.8, 0, 0}, {21, 12.8, 0, 0});
  GradientDescentConfig cfg;
  cfg.max_iterations = 0;
  const PlanResult r = plan_gradient_descent(bad, model, cfg);
  REQUIRE_FALSE(r.verdict.feasible);
  std::ostringstream b;
  render_svg(b, r, bad, model);
  CHECK(b.str().size() > svg.size());
  CHECK(b.str().find("violation") != std::string::npos);

  CHECK_THROWS_AS(render_svg(std::filesystem::path("/nonexistent/dir/out.svg"), ok, ctx, model), IoError);
}
