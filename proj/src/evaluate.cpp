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

#include "bsplan/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace bsplan
{

PlannerKind parse_planner(const std::string & name)
{
  if (name == "gd" || name == "gradient-descent") {
    return PlannerKind::gradient_descent;
  }
  if (name == "neural" || name == "nn") {
    return PlannerKind::neural;
  }
  throw ContractError("unknown planner '" + name + "' (expected gd or neural)");
}

std::string planner_name(PlannerKind kind) { return kind == PlannerKind::neural ? "neural" : "gd"; }

FeasibilityVerdict verify_independent(
  const ControlPolygon & polygon, const KnotVector & knots, std::size_t num_samples, const OccupancyGrid & grid,
  const VehicleParams & vehicle)
{
  const DerivativeSpline first = derivative_polygon(polygon, knots);
  const DerivativeSpline second = derivative_polygon(first.points, first.knots);
  const auto params = uniform_params(num_samples);

  PathSamples s;
  for (double t : params) {
    s.positions.push_back(evaluate(polygon, knots, t));
    s.first_deriv.push_back(evaluate(first.points, first.knots, t));
    s.second_deriv.push_back(evaluate(second.points, second.knots, t));
  }
  SampleOptions opts;
  opts.degenerate_curvature = 10.0 * vehicle.kappa_max;
  fill_curvature(s, opts);

  FeasibilityVerdict v;
  v.collision_free = true;
  double heading = 0.0;
  bool have_heading = false;
  double turning = 0.0;
  for (std::size_t i = 0; i < num_samples; ++i) {
    v.max_abs_curvature = std::max(v.max_abs_curvature, std::abs(s.curvature[i]));
    if (!s.degenerate[i]) {
      const double h = std::atan2(s.first_deriv[i].y, s.first_deriv[i].x);
      if (have_heading) {
        turning += std::abs(wrap_angle(h - heading));
      }
      heading = h;
      have_heading = true;
    }
    if (v.collision_free && collision_indicator(footprint_at(s.positions[i], heading, vehicle), grid) != 0) {
      v.collision_free = false;
    }
  }
  v.curvature_ok = v.max_abs_curvature <= vehicle.kappa_max + 1e-9;
  v.monotone = s.num_degenerate == 0 && turning < 2.0 * std::numbers::pi;
  v.feasible = v.collision_free && v.curvature_ok && v.monotone;
  return v;
}

MetricsReport summarize(std::string planner, int depth, std::vector<ScenarioRow> rows)
{
  MetricsReport r;
  r.planner = std::move(planner);
  r.depth = depth;
  r.total = rows.size();
  double sum_t = 0.0;
  double sum_k = 0.0;
  for (const auto & row : rows) {
    sum_t += row.time_ms;
    if (row.verdict.feasible) {
      ++r.feasible;
      sum_k += row.verdict.max_abs_curvature;
    }
  }
  if (r.total > 0) {
    r.accuracy = 100.0 * static_cast<double>(r.feasible) / static_cast<double>(r.total);
    r.mean_time_ms = sum_t / static_cast<double>(r.total);
    double var = 0.0;
    for (const auto & row : rows) {
      var += (row.time_ms - r.mean_time_ms) * (row.time_ms - r.mean_time_ms);
    }
    r.std_time_ms = std::sqrt(var / static_cast<double>(r.total));
  }
  if (r.feasible > 0) {
    r.mean_max_kappa = sum_k / static_cast<double>(r.feasible);
  }
  r.rows = std::move(rows);
  return r;
}

std::vector<PlanningContext> prepare_suite(const ScenarioSuite & suite, const VehicleParams & vehicle)
{
  std::vector<PlanningContext> out(suite.scenarios.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = prepare(suite.scenarios[k], vehicle);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

MetricsReport evaluate(std::span<const PlanningContext> suite, const EvaluateOptions & opts, std::vector<PlanResult> * results)
{
  if (suite.empty()) {
    throw ContractError("cannot evaluate an empty suite");
  }
  if (opts.planner == PlannerKind::neural && opts.model == nullptr) {
    throw ContractError("the neural planner needs a model");
  }
  const int depth = opts.planner == PlannerKind::neural ? opts.model->depth() : opts.depth;
  const PathModel model = make_path_model(depth, opts.num_samples);
  const int repeats = std::max(1, opts.timing_repeats);
  GradientDescentConfig gd = opts.gd;
  gd.exec = Exec::serial;

  std::vector<ScenarioRow> rows(suite.size());
  std::vector<PlanResult> plans(suite.size());
  std::vector<std::exception_ptr> errors(suite.size());
  const auto n = static_cast<std::ptrdiff_t>(suite.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const PlanningContext & ctx = suite[k];
    try {
      std::vector<double> times;
      for (int r = 0; r < repeats; ++r) {
        PlanResult res = opts.planner == PlannerKind::neural ? plan_neural(*opts.model, ctx, model, Exec::serial)
                                                             : plan_gradient_descent(ctx, model, gd);
        times.push_back(res.wall_time * 1e3);
        if (r == 0) {
          plans[k] = std::move(res);
        }
      }
      std::sort(times.begin(), times.end());
      const PlanResult & plan = plans[k];
      if (plan.verdict.feasible) {
        const FeasibilityVerdict check =
          verify_independent(plan.polygon, model.knots, opts.num_samples, ctx.grid(), ctx.vehicle);
        if (!check.feasible) {
          throw VerificationFailure(
            "scenario '" + ctx.scenario.id + "': planner reports a feasible path, independent check disagrees (" +
            "collision_free=" + std::to_string(check.collision_free) + " curvature_ok=" +
            std::to_string(check.curvature_ok) + " monotone=" + std::to_string(check.monotone) + ")");
        }
      }
      ScenarioRow & row = rows[k];
      row.id = ctx.scenario.id;
      row.kind = ctx.scenario.kind;
      row.verdict = plan.verdict;
      for (double l : plan.samples.seg_lengths) {
        row.path_length += l;
      }
      row.iterations = plan.iterations;
      row.time_ms = times[times.size() / 2];
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  if (results != nullptr) {
    *results = std::move(plans);
  }
  return summarize(planner_name(opts.planner), depth, std::move(rows));
}

namespace
{

std::string fmt(double v, int digits = 6)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream & out, const MetricsReport & r, bool include_timing)
{
  out << "# planner=" << r.planner << " depth=" << r.depth << " total=" << r.total << " feasible=" << r.feasible
      << " accuracy=" << fmt(r.accuracy, 3) << " mean_max_kappa=" << fmt(r.mean_max_kappa);
  if (include_timing) {
    out << " mean_time_ms=" << fmt(r.mean_time_ms, 3) << " std_time_ms=" << fmt(r.std_time_ms, 3);
  }
  out << '\n';
  out << "scenario,kind,feasible,collision_free,curvature_ok,monotone,max_kappa,path_length,iterations";
  if (include_timing) {
    out << ",time_ms";
  }
  out << '\n';
  for (const auto & row : r.rows) {
    out << row.id << ',' << row.kind << ',' << row.verdict.feasible << ',' << row.verdict.collision_free << ','
        << row.verdict.curvature_ok << ',' << row.verdict.monotone << ',' << fmt(row.verdict.max_abs_curvature) << ','
        << fmt(row.path_length, 4) << ',' << row.iterations;
    if (include_timing) {
      out << ',' << fmt(row.time_ms, 3);
    }
    out << '\n';
  }
}

std::string format_report_table(const MetricsReport & r)
{
  std::ostringstream out;
  out << "planner            " << r.planner << " (D=" << r.depth << ")\n"
      << "scenarios          " << r.total << '\n'
      << "accuracy [%]       " << fmt(r.accuracy, 2) << "  (" << r.feasible << " feasible)\n"
      << "time [ms]          " << fmt(r.mean_time_ms, 2) << " +- " << fmt(r.std_time_ms, 2) << '\n'
      << "mean max kappa     " << fmt(r.mean_max_kappa, 4) << " 1/m\n";
  return out.str();
}

std::vector<AblationRow> ablate_depth(std::span<const PlanningContext> suite, const AblationOptions & opts)
{
  const std::size_t nd = opts.depths.size();
  std::vector<std::optional<NetworkModel>> models(nd);
  std::vector<PathModel> paths;
  std::vector<AblationRow> rows;
  for (std::size_t d = 0; d < nd; ++d) {
    const int depth = opts.depths[d];
    EvaluateOptions eo = opts.evaluate;
    eo.planner = opts.planner;
    eo.depth = depth;
    eo.timing_repeats = 1;
    if (opts.planner == PlannerKind::neural) {
      NetworkShape shape;
      shape.depth = depth;
      if (!suite.empty()) {
        shape.grid_width = suite.front().grid().width();
        shape.grid_height = suite.front().grid().height();
      }
      const VehicleParams vehicle = suite.empty() ? VehicleParams{} : suite.front().vehicle;
      models[d] = NetworkModel::random(shape, vehicle, opts.model_seed);
      if (opts.train.epochs > 0) {
        TrainConfig tc = opts.train;
        tc.depth = depth;
        models[d] = train(std::move(*models[d]), suite, tc).model;
      }
      eo.model = &*models[d];
    }
    paths.push_back(make_path_model(depth, opts.evaluate.num_samples));
    rows.push_back({depth, evaluate(suite, eo)});
  }

  // The remaining timing runs cycle through the depths scenario by scenario,
  // so slow drift of the machine cannot pose as a depth effect; the per-depth
  // differences are only a few microseconds.
  const int extra = std::max(1, opts.evaluate.timing_repeats) - 1;
  if (extra == 0 || suite.empty()) {
    return rows;
  }
  GradientDescentConfig gd = opts.evaluate.gd;
  gd.exec = Exec::serial;
  const auto n = static_cast<std::ptrdiff_t>(suite.size());
#pragma omp parallel for schedule(dynamic) if (opts.evaluate.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    std::vector<std::vector<double>> times(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      times[d].push_back(rows[d].report.rows[k].time_ms);
    }
    for (int r = 0; r < extra; ++r) {
      for (std::size_t d = 0; d < nd; ++d) {
        const PlanResult res = opts.planner == PlannerKind::neural
                                 ? plan_neural(*models[d], suite[k], paths[d], Exec::serial)
                                 : plan_gradient_descent(suite[k], paths[d], gd);
        times[d].push_back(res.wall_time * 1e3);
      }
    }
    for (std::size_t d = 0; d < nd; ++d) {
      std::sort(times[d].begin(), times[d].end());
      rows[d].report.rows[k].time_ms = times[d][times[d].size() / 2];
    }
  }
  for (auto & row : rows) {
    row.report = summarize(row.report.planner, row.depth, std::move(row.report.rows));
  }
  return rows;
}

void write_ablation_csv(std::ostream & out, const std::vector<AblationRow> & rows, bool include_timing)
{
  out << "depth,planner,control_points,total,feasible,accuracy,mean_max_kappa";
  if (include_timing) {
    out << ",mean_time_ms,std_time_ms";
  }
  out << '\n';
  for (const auto & row : rows) {
    const auto & r = row.report;
    out << row.depth << ',' << r.planner << ',' << num_control_points(row.depth) << ',' << r.total << ','
        << r.feasible << ',' << fmt(r.accuracy, 3) << ',' << fmt(r.mean_max_kappa);
    if (include_timing) {
      out << ',' << fmt(r.mean_time_ms, 4) << ',' << fmt(r.std_time_ms, 4);
    }
    out << '\n';
  }
}

std::string format_ablation_table(const std::vector<AblationRow> & rows)
{
  std::ostringstream out;
  out << "  D   N  accuracy[%]  time[ms]  mean max kappa\n";
  for (const auto & row : rows) {
    char buf[128];
    std::snprintf(
      buf, sizeof buf, "%3d %3zu %12.2f %9.3f %15.4f\n", row.depth, num_control_points(row.depth),
      row.report.accuracy, row.report.mean_time_ms, row.report.mean_max_kappa);
    out << buf;
  }
  return out.str();
}

}  // namespace bsplan
