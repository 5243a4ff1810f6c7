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

// bsplan: generate scenario suites, plan, train, evaluate and render.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsplan/evaluate.hpp"
#include "bsplan/render.hpp"
#include "bsplan/suite.hpp"
#include "bsplan/train.hpp"

namespace
{

using namespace bsplan;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitIo = 3;

struct Common
{
  VehicleParams vehicle;
  double gamma{0.1};
  std::size_t samples{kDefaultSamples};
  int depth{3};
  std::string planner{"gd"};
  std::string model_path;
  int max_iterations{500};
  bool serial{false};
};

void add_vehicle_flags(CLI::App * app, Common & c)
{
  app->add_option("--length", c.vehicle.length, "vehicle length [m]")->check(CLI::PositiveNumber);
  app->add_option("--width", c.vehicle.width, "vehicle width [m]")->check(CLI::PositiveNumber);
  app->add_option("--rear-offset", c.vehicle.rear_axle_offset, "rear bumper to rear axle center [m]");
  app->add_option("--kappa-max", c.vehicle.kappa_max, "curvature bound [1/m]")->check(CLI::PositiveNumber);
}

void add_planner_flags(CLI::App * app, Common & c)
{
  app->add_option("--planner", c.planner, "gd | neural")->check(CLI::IsMember({"gd", "neural"}));
  app->add_option("-D,--depth", c.depth, "tree depth (gd planner)")->check(CLI::Range(1, 8));
  app->add_option("--model", c.model_path, "network checkpoint (neural planner)");
  app->add_option("--gamma", c.gamma, "weight of the total curvature term")->check(CLI::NonNegativeNumber);
  app->add_option("-S,--samples", c.samples, "samples per path")->check(CLI::Range(8, 1 << 20));
  app->add_option("--max-iter", c.max_iterations, "iteration cap (gd planner)")->check(CLI::PositiveNumber);
  app->add_flag("--serial", c.serial, "run every kernel on one thread");
}

GradientDescentConfig gd_config(const Common & c)
{
  GradientDescentConfig gd;
  gd.max_iterations = c.max_iterations;
  gd.loss.gamma = c.gamma;
  gd.exec = c.serial ? Exec::serial : Exec::parallel;
  return gd;
}

std::optional<NetworkModel> load_network(const Common & c)
{
  if (c.planner != "neural") {
    return std::nullopt;
  }
  if (c.model_path.empty()) {
    throw ContractError("--planner neural needs --model");
  }
  return load_model(c.model_path);
}

void write_text(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
}

nlohmann::json result_json(const PlanResult & r, const PlanningContext & ctx, int depth)
{
  nlohmann::json j;
  j["scenario"] = ctx.scenario.id;
  j["depth"] = depth;
  j["phi"] = r.phi.phi;
  nlohmann::json poly = nlohmann::json::array();
  for (const auto & p : r.polygon) {
    poly.push_back({p.x, p.y});
  }
  j["control_points"] = poly;
  j["feasible"] = r.verdict.feasible;
  j["collision_free"] = r.verdict.collision_free;
  j["curvature_ok"] = r.verdict.curvature_ok;
  j["monotone"] = r.verdict.monotone;
  j["max_abs_curvature"] = r.verdict.max_abs_curvature;
  j["loss"] = {{"curv", r.loss.curv}, {"coll", r.loss.coll}, {"tcurv", r.loss.tcurv},
               {"sigma", r.loss.sigma_tcurv}, {"total", r.loss.total}};
  j["iterations"] = r.iterations;
  return j;
}

// Plans scenario `index` of a suite file; shared by `plan` and `render`.
struct SinglePlan
{
  PlanningContext ctx;
  PathModel model;
  PlanResult result;
};

SinglePlan plan_one(const Common & c, const std::string & suite_path, std::size_t index)
{
  const ScenarioSuite suite = load_suite(suite_path);
  if (index >= suite.scenarios.size()) {
    throw ContractError("--index " + std::to_string(index) + " out of range (suite has " +
                        std::to_string(suite.scenarios.size()) + " scenarios)");
  }
  c.vehicle.validate();
  PlanningContext ctx = prepare(suite.scenarios[index], c.vehicle);
  const auto network = load_network(c);
  const int depth = network ? network->depth() : c.depth;
  PathModel model = make_path_model(depth, c.samples);
  PlanResult r = network ? plan_neural(*network, ctx, model, c.serial ? Exec::serial : Exec::parallel)
                         : plan_gradient_descent(ctx, model, gd_config(c));
  if (r.verdict.feasible) {
    const auto check = verify_independent(r.polygon, model.knots, c.samples, ctx.grid(), ctx.vehicle);
    if (!check.feasible) {
      throw VerificationFailure("independent check rejects the planner's feasible path for '" + ctx.scenario.id + "'");
    }
  }
  return {std::move(ctx), std::move(model), std::move(r)};
}

std::vector<int> parse_depths(const std::string & text)
{
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(item, &used);
      if (used != item.size() || d < 1 || d > 8) {
        throw std::invalid_argument(item);
      }
      out.push_back(d);
    } catch (const std::exception &) {
      throw ContractError("bad depth list entry '" + item + "'");
    }
  }
  if (out.empty()) {
    throw ContractError("empty depth list");
  }
  return out;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"bsplan: curvature-bounded B-spline maneuver planning"};
  app.require_subcommand(1);
  // one option set per verb so defaults can differ
  Common cg, cp, ct, ce, ca, cr;
  cp.planner = ce.planner = cr.planner = "gd";
  ca.planner = "neural";

  // generate
  auto * gen = app.add_subcommand("generate", "write a synthetic scenario suite");
  std::string gen_kind = "easy";
  std::size_t gen_count = 200;
  std::uint64_t seed = 1;
  std::string out_path;
  SuiteKnobs knobs;
  gen->add_option("--kind", gen_kind, "empty|corridor|turn|parking|obstacle-field|easy|mixed")->required();
  gen->add_option("-n,--count", gen_count, "number of scenarios")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("-o,--out", out_path, "suite file (json)")->required();
  gen->add_option("--corridor-width", knobs.corridor_width, "[m]")->check(CLI::PositiveNumber);
  gen->add_option("--turn-radius", knobs.turn_inner_radius, "inner wall radius of bends [m]")->check(CLI::PositiveNumber);
  gen->add_option("--road-width", knobs.turn_road_width, "road width in bends [m]")->check(CLI::PositiveNumber);
  gen->add_option("--obstacles", knobs.obstacle_count, "obstacles per obstacle-field map")->check(CLI::NonNegativeNumber);
  gen->add_option("--obstacle-size", knobs.obstacle_max_size, "[m]")->check(CLI::PositiveNumber);
  gen->add_option("--clearance", knobs.min_clearance, "reference path clearance a draft must admit [m]")
    ->check(CLI::NonNegativeNumber);
  gen->add_option("--endpoint-clearance", knobs.endpoint_clearance, "obstacle-free radius around start and goal [m]")
    ->check(CLI::NonNegativeNumber);
  gen->add_option("--bay-width", knobs.parking_bay_width, "[m]")->check(CLI::PositiveNumber);
  gen->add_option("--cells", knobs.grid_cells, "grid side in cells")->check(CLI::Range(16, 4096));
  gen->add_option("--resolution", knobs.resolution, "[m/cell]")->check(CLI::PositiveNumber);
  add_vehicle_flags(gen, cg);

  // plan
  auto * plan = app.add_subcommand("plan", "plan one scenario and print the verdict");
  std::string suite_path;
  std::size_t index = 0;
  std::string svg_path;
  plan->add_option("--suite", suite_path, "suite or scenario file")->required();
  plan->add_option("--index", index, "scenario index within the suite");
  plan->add_option("-o,--out", out_path, "result json");
  plan->add_option("--svg", svg_path, "also render to this file");
  add_planner_flags(plan, cp);
  add_vehicle_flags(plan, cp);

  // train
  auto * tr = app.add_subcommand("train", "train the planner network on a suite");
  TrainConfig tc;
  std::string history_path;
  tr->add_option("--suite", suite_path, "training suite")->required();
  tr->add_option("-o,--out", out_path, "checkpoint to write")->required();
  tr->add_option("--epochs", tc.epochs)->check(CLI::NonNegativeNumber);
  tr->add_option("--lr", tc.learning_rate)->check(CLI::PositiveNumber);
  tr->add_option("--batch", tc.batch_size)->check(CLI::PositiveNumber);
  tr->add_option("-D,--depth", tc.depth)->check(CLI::Range(1, 8));
  tr->add_option("--gamma", tc.gamma)->check(CLI::NonNegativeNumber);
  tr->add_option("--seed", tc.seed);
  tr->add_option("--val-fraction", tc.val_fraction)->check(CLI::Range(0.0, 0.9));
  tr->add_option("--history", history_path, "per-epoch metrics (csv)");
  add_vehicle_flags(tr, ct);

  // evaluate
  auto * ev = app.add_subcommand("evaluate", "plan a whole suite and report metrics");
  std::string csv_path;
  int repeats = 3;
  bool no_timing = false;
  ev->add_option("--suite", suite_path, "suite file")->required();
  ev->add_option("--csv", csv_path, "per-scenario report");
  ev->add_option("--repeats", repeats, "timing repeats per scenario (median)")->check(CLI::PositiveNumber);
  ev->add_flag("--no-timing", no_timing, "omit timing columns from the csv");
  add_planner_flags(ev, ce);
  add_vehicle_flags(ev, ce);

  // ablate-depth
  auto * ab = app.add_subcommand("ablate-depth", "accuracy and time per tree depth");
  std::string depths = "1,2,3,4";
  int ab_epochs = 0;
  ab->add_option("--suite", suite_path, "suite file")->required();
  ab->add_option("--depths", depths, "comma separated list");
  ab->add_option("--epochs", ab_epochs, "training epochs per depth (neural planner)")->check(CLI::NonNegativeNumber);
  ab->add_option("--seed", seed, "network init / training seed");
  ab->add_option("--csv", csv_path, "ablation table");
  ab->add_option("--repeats", repeats, "timing repeats per scenario (median)")->check(CLI::PositiveNumber);
  ab->add_flag("--no-timing", no_timing, "omit timing columns from the csv");
  add_planner_flags(ab, ca);
  add_vehicle_flags(ab, ca);
  // render
  auto * rd = app.add_subcommand("render", "plan one scenario and draw it as SVG");
  rd->add_option("--suite", suite_path, "suite or scenario file")->required();
  rd->add_option("--index", index, "scenario index within the suite");
  rd->add_option("-o,--out", svg_path, "svg file")->required();
  add_planner_flags(rd, cr);
  add_vehicle_flags(rd, cr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  Common & c = gen->parsed() ? cg : plan->parsed() ? cp : tr->parsed() ? ct : ev->parsed() ? ce : ab->parsed() ? ca : cr;

  try {
    c.vehicle.validate();
    if (gen->parsed()) {
      const ScenarioSuite suite = generate_suite(gen_kind, gen_count, seed, knobs, c.vehicle);
      save_suite(out_path, suite);
      std::cout << "wrote " << suite.scenarios.size() << " " << gen_kind << " scenarios to " << out_path << '\n';
    } else if (plan->parsed()) {
      const SinglePlan sp = plan_one(c, suite_path, index);
      const auto j = result_json(sp.result, sp.ctx, sp.model.depth);
      if (!out_path.empty()) {
        write_text(out_path, j.dump(2) + "\n");
      }
      std::printf(
        "%s: %s  max|kappa|=%.4f  total=%.6g  iterations=%d  time=%.2f ms\n", sp.ctx.scenario.id.c_str(),
        sp.result.verdict.feasible ? "feasible" : "infeasible", sp.result.verdict.max_abs_curvature,
        sp.result.loss.total, sp.result.iterations, sp.result.wall_time * 1e3);
      if (!svg_path.empty()) {
        render_svg(svg_path, sp.result, sp.ctx, sp.model);
      }
    } else if (rd->parsed()) {
      const SinglePlan sp = plan_one(c, suite_path, index);
      render_svg(svg_path, sp.result, sp.ctx, sp.model);
      std::cout << "wrote " << svg_path << '\n';
    } else if (tr->parsed()) {
      const ScenarioSuite suite = load_suite(suite_path);
      const auto contexts = prepare_suite(suite, c.vehicle);
      NetworkShape shape;
      shape.depth = tc.depth;
      shape.grid_width = contexts.front().grid().width();
      shape.grid_height = contexts.front().grid().height();
      std::ostringstream hist;
      hist << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
      auto result = train(NetworkModel::random(shape, c.vehicle, tc.seed), contexts, tc, [&](const EpochMetrics & m) {
        char buf[160];
        std::snprintf(
          buf, sizeof buf, "%d,%.9g,%.3f,%.9g,%.3f\n", m.epoch, m.train_loss, m.train_accuracy, m.val_loss,
          m.val_accuracy);
        hist << buf;
        std::printf(
          "epoch %3d  train loss %.4f acc %.1f%%  val loss %.4f acc %.1f%%\n", m.epoch, m.train_loss,
          m.train_accuracy, m.val_loss, m.val_accuracy);
        std::fflush(stdout);
      });
      save_model(out_path, result.model);
      if (!history_path.empty()) {
        write_text(history_path, hist.str());
      }
    } else if (ev->parsed()) {
      const ScenarioSuite suite = load_suite(suite_path);
      const auto contexts = prepare_suite(suite, c.vehicle);
      const auto network = load_network(c);
      EvaluateOptions eo;
      eo.planner = parse_planner(c.planner);
      eo.depth = c.depth;
      eo.model = network ? &*network : nullptr;
      eo.gd = gd_config(c);
      eo.timing_repeats = repeats;
      eo.parallel = !c.serial;
      eo.num_samples = c.samples;
      const MetricsReport report = evaluate(contexts, eo);
      std::cout << format_report_table(report);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, report, !no_timing);
        write_text(csv_path, csv.str());
      }
    } else if (ab->parsed()) {
      const ScenarioSuite suite = load_suite(suite_path);
      const auto contexts = prepare_suite(suite, c.vehicle);
      AblationOptions ao;
      ao.depths = parse_depths(depths);
      ao.planner = parse_planner(c.planner);
      ao.model_seed = seed;
      ao.train.epochs = ab_epochs;
      ao.train.seed = seed;
      ao.train.gamma = c.gamma;
      ao.evaluate.gd = gd_config(c);
      ao.evaluate.timing_repeats = repeats;
      ao.evaluate.num_samples = c.samples;
      // timing is measured one scenario at a time so depths compare fairly
      ao.evaluate.parallel = false;
      const auto rows = ablate_depth(contexts, ao);
      std::cout << format_ablation_table(rows);
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_ablation_csv(csv, rows, !no_timing);
        write_text(csv_path, csv.str());
      }
    }
  } catch (const VerificationFailure & e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kExitVerification;
  } catch (const IoError & e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError & e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
