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

#include "bsplan/scenario.hpp"

#include <fstream>
#include <sstream>

namespace bsplan
{

using nlohmann::json;

bool same_scenario(const Scenario & a, const Scenario & b)
{
  const bool grids = (a.grid == b.grid) || (a.grid && b.grid && *a.grid == *b.grid);
  return grids && a.id == b.id && a.kind == b.kind && a.q0 == b.q0 && a.qd == b.qd && a.vehicle == b.vehicle;
}

PlanningContext prepare(const Scenario & scenario, const VehicleParams & default_vehicle)
{
  if (!scenario.grid) {
    throw ContractError("scenario '" + scenario.id + "' has no grid");
  }
  PlanningContext ctx;
  ctx.scenario = scenario;
  ctx.vehicle = scenario.vehicle.value_or(default_vehicle);
  ctx.vehicle.validate();
  ctx.checker = std::make_shared<const CollisionChecker>(*scenario.grid, ctx.vehicle, Exec::serial);
  ctx.reference = reference_path(*scenario.grid, scenario.q0, scenario.qd, ctx.vehicle);
  ctx.free_distance = std::make_shared<const DistanceField>(DistanceField::to_free(*scenario.grid, Exec::serial));
  return ctx;
}

namespace
{

json config_to_json(const Configuration & q) { return json::array({q.x, q.y, q.theta, q.kappa}); }

Configuration config_from_json(const json & j, const char * name)
{
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(std::string("scenario: '") + name + "' must be [x, y, theta, kappa]");
  }
  return Configuration{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json grid_to_json(const OccupancyGrid & grid)
{
  std::ostringstream text;
  write_grid(text, grid, GridFormat::text);
  json rows = json::array();
  std::istringstream lines(text.str());
  for (std::string line; std::getline(lines, line);) {
    rows.push_back(line);
  }
  return json{{"encoding", "text"}, {"resolution", grid.resolution()}, {"rows", rows}};
}

OccupancyGrid grid_from_json(const json & j, const std::filesystem::path & base_dir)
{
  const double resolution = j.value("resolution", kDefaultResolution);
  if (j.contains("file")) {
    std::filesystem::path p = j.at("file").get<std::string>();
    if (p.is_relative()) {
      p = base_dir / p;
    }
    return load_grid_file(p, resolution);
  }
  if (j.value("encoding", "text") != "text" || !j.contains("rows")) {
    throw ParseError("scenario grid needs 'rows' (text encoding) or 'file'");
  }
  std::ostringstream text;
  for (const auto & row : j.at("rows")) {
    text << row.get<std::string>() << '\n';
  }
  std::istringstream in(text.str());
  auto grid = load_grid(in, GridFormat::text, resolution);
  if (j.contains("width") && j.at("width").get<int>() != grid.width()) {
    throw ParseError("scenario grid: declared width does not match rows");
  }
  if (j.contains("height") && j.at("height").get<int>() != grid.height()) {
    throw ParseError("scenario grid: declared height does not match rows");
  }
  return grid;
}

json vehicle_to_json(const VehicleParams & v)
{
  return json{{"length", v.length}, {"width", v.width}, {"rear_axle_offset", v.rear_axle_offset}, {"kappa_max", v.kappa_max}};
}

VehicleParams vehicle_from_json(const json & j)
{
  VehicleParams v;
  v.length = j.value("length", v.length);
  v.width = j.value("width", v.width);
  v.rear_axle_offset = j.value("rear_axle_offset", v.rear_axle_offset);
  v.kappa_max = j.value("kappa_max", v.kappa_max);
  v.validate();
  return v;
}

json read_json(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception & e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path & path, const json & j)
{
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << j.dump(1) << '\n';
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace

json scenario_to_json(const Scenario & s)
{
  if (!s.grid) {
    throw ContractError("scenario '" + s.id + "' has no grid");
  }
  json j{{"format", "bsplan-scenario"}, {"version", 1},        {"id", s.id},
         {"kind", s.kind},              {"grid", grid_to_json(*s.grid)}, {"q0", config_to_json(s.q0)},
         {"qd", config_to_json(s.qd)}};
  if (s.vehicle) {
    j["vehicle"] = vehicle_to_json(*s.vehicle);
  }
  return j;
}

Scenario scenario_from_json(const json & j, const std::filesystem::path & base_dir)
{
  try {
    if (j.value("format", "bsplan-scenario") != "bsplan-scenario") {
      throw ParseError("not a scenario document");
    }
    if (j.value("version", 1) != 1) {
      throw ParseError("unsupported scenario version");
    }
    Scenario s;
    s.id = j.value("id", "");
    s.kind = j.value("kind", "file");
    s.grid = std::make_shared<const OccupancyGrid>(grid_from_json(j.at("grid"), base_dir));
    s.q0 = config_from_json(j.at("q0"), "q0");
    s.qd = config_from_json(j.at("qd"), "qd");
    if (j.contains("vehicle")) {
      s.vehicle = vehicle_from_json(j.at("vehicle"));
    }
    return s;
  } catch (const json::exception & e) {
    throw ParseError(std::string("scenario: ") + e.what());
  } catch (const ContractError & e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path & path)
{
  return scenario_from_json(read_json(path), path.parent_path());
}

void save_scenario(const std::filesystem::path & path, const Scenario & s) { write_json(path, scenario_to_json(s)); }

json suite_to_json(const ScenarioSuite & suite)
{
  json scenarios = json::array();
  for (const auto & s : suite.scenarios) {
    scenarios.push_back(scenario_to_json(s));
  }
  return json{{"format", "bsplan-suite"}, {"version", 1},        {"name", suite.name},
              {"kind", suite.kind},       {"seed", suite.seed}, {"scenarios", scenarios}};
}

ScenarioSuite suite_from_json(const json & j, const std::filesystem::path & base_dir)
{
  if (j.value("format", "") == "bsplan-scenario") {
    Scenario s = scenario_from_json(j, base_dir);
    return ScenarioSuite{s.id, s.kind, 0, {s}};
  }
  try {
    if (j.value("format", "") != "bsplan-suite") {
      throw ParseError("not a suite document");
    }
    if (j.value("version", 1) != 1) {
      throw ParseError("unsupported suite version");
    }
    ScenarioSuite suite;
    suite.name = j.value("name", "");
    suite.kind = j.value("kind", "");
    suite.seed = j.value("seed", 0ULL);
    for (const auto & sj : j.at("scenarios")) {
      suite.scenarios.push_back(scenario_from_json(sj, base_dir));
    }
    return suite;
  } catch (const json::exception & e) {
    throw ParseError(std::string("suite: ") + e.what());
  }
}

ScenarioSuite load_suite(const std::filesystem::path & path)
{
  return suite_from_json(read_json(path), path.parent_path());
}

void save_suite(const std::filesystem::path & path, const ScenarioSuite & suite)
{
  write_json(path, suite_to_json(suite));
}

}  // namespace bsplan
