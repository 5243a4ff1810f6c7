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

#ifndef BSPLAN__SCENARIO_HPP_
#define BSPLAN__SCENARIO_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsplan/geometry.hpp"
#include "bsplan/world.hpp"

namespace bsplan
{

struct Scenario
{
  std::string id;
  std::string kind;
  std::shared_ptr<const OccupancyGrid> grid;
  Configuration q0;
  Configuration qd;
  std::optional<VehicleParams> vehicle;  // per-scenario override
};

bool same_scenario(const Scenario & a, const Scenario & b);

/// A scenario with everything the losses need precomputed: the collision
/// checker, the reference path (when one exists) and the free-space distance
/// field used when it does not.
struct PlanningContext
{
  Scenario scenario;
  VehicleParams vehicle;
  std::optional<ReferencePath> reference;
  std::shared_ptr<const CollisionChecker> checker;
  std::shared_ptr<const DistanceField> free_distance;

  const OccupancyGrid & grid() const { return *scenario.grid; }
};

PlanningContext prepare(const Scenario & scenario, const VehicleParams & default_vehicle);

nlohmann::json scenario_to_json(const Scenario & s);
/// `base_dir` resolves relative grid file references.
Scenario scenario_from_json(const nlohmann::json & j, const std::filesystem::path & base_dir = {});

Scenario load_scenario(const std::filesystem::path & path);
void save_scenario(const std::filesystem::path & path, const Scenario & s);

struct ScenarioSuite
{
  std::string name;
  std::string kind;
  unsigned long long seed{0};
  std::vector<Scenario> scenarios;
};

nlohmann::json suite_to_json(const ScenarioSuite & suite);
ScenarioSuite suite_from_json(const nlohmann::json & j, const std::filesystem::path & base_dir = {});

/// Accepts either a suite file or a single scenario file.
ScenarioSuite load_suite(const std::filesystem::path & path);
void save_suite(const std::filesystem::path & path, const ScenarioSuite & suite);

}  // namespace bsplan

#endif  // BSPLAN__SCENARIO_HPP_
