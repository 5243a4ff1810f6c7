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
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bsplan/suite.hpp"
#include "oracles.hpp"

using namespace bsplan;

TEST_CASE("scenario json round trip")
{
  auto grid = oracles::empty_grid(40, 0.25);
  grid->fill_box({2, 2}, {3, 6});
  Scenario s = oracles::make_scenario(grid, {1, 1.5, 0.25, 0.1}, {8.5, 7, -1.0, 0}, "round");
  VehicleParams v;
  v.kappa_max = 0.2;
  s.vehicle = v;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(same_scenario(s, back));
  CHECK(*back.grid == *grid);
  CHECK(back.vehicle == s.vehicle);

  const auto dir = std::filesystem::temp_directory_path() / "bsplan_test_scenario";
  std::filesystem::create_directories(dir);
  save_scenario(dir / "s.json", s);
  CHECK(same_scenario(load_scenario(dir / "s.json"), s));
  // a single scenario file loads as a suite of one
  CHECK(load_suite(dir / "s.json").scenarios.size() == 1);

  // grids may live next to the scenario file
  {
    std::ofstream map(dir / "map.txt");
    map << "....\n.##.\n....\n";
  }
  nlohmann::json j = scenario_to_json(s);
  j["grid"] = {{"file", "map.txt"}, {"resolution", 1.0}};
  const Scenario ref = scenario_from_json(j, dir);
  CHECK(ref.grid->width() == 4);
  CHECK(ref.grid->occupied(1, 1));
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(load_scenario("/nonexistent/s.json"), IoError);
  nlohmann::json broken = scenario_to_json(s);
  broken["q0"] = {1, 2};
  CHECK_THROWS_AS(scenario_from_json(broken), ParseError);
}

TEST_CASE("suites are deterministic")
{
  for (const char * kind : {"empty", "corridor", "turn", "parking", "obstacle-field", "easy", "mixed"}) {
    INFO(kind);
    const ScenarioSuite a = generate_suite(kind, 6, 42);
    const ScenarioSuite b = generate_suite(kind, 6, 42);
    REQUIRE(a.scenarios.size() == 6);
    CHECK(suite_to_json(a) == suite_to_json(b));
    CHECK(suite_to_json(a).dump() == suite_to_json(suite_from_json(suite_to_json(a))).dump());
    CHECK(suite_to_json(a) != suite_to_json(generate_suite(kind, 6, 43)));
  }
  CHECK_FALSE(is_known_kind("swamp"));
  CHECK_THROWS(generate_suite("swamp", 3, 1));
}

TEST_CASE("generated endpoints are free and reachable")
{
  const VehicleParams v;
  for (const auto & s : generate_suite("mixed", 10, 3).scenarios) {
    const CollisionChecker checker(*s.grid, v);
    CHECK_FALSE(checker.collides(s.q0.position(), s.q0.theta));
    CHECK_FALSE(checker.collides(s.qd.position(), s.qd.theta));
    CHECK(reference_path(*s.grid, s.q0, s.qd, v).has_value());
  }
}

TEST_CASE("corridors run along x with near aligned endpoints")
{
  SuiteKnobs k;
  k.corridor_width = 6.0;
  const VehicleParams v;
  for (const auto & s : generate_suite("corridor", 5, 8, k).scenarios) {
    CHECK(std::abs(s.q0.theta) <= 0.12);
    CHECK(std::abs(s.qd.theta) <= 0.12);
    CHECK(s.qd.x > s.q0.x + 10.0);
    const auto ref = reference_path(*s.grid, s.q0, s.qd, v);
    REQUIRE(ref.has_value());
    for (std::size_t i = 1; i < ref->polyline.size(); ++i) {
      CHECK(ref->polyline[i].x >= ref->polyline[i - 1].x);
    }
    // free band of the corridor around the start
    const auto [cx, cy] = s.grid->cell_of(s.q0.position());
    int free_rows = 0;
    for (int y = 0; y < s.grid->height(); ++y) {
      free_rows += s.grid->occupied(cx, y) ? 0 : 1;
    }
    CHECK(free_rows * s.grid->resolution() == doctest::Approx(6.0).epsilon(0.05));
    CHECK_FALSE(s.grid->occupied(cx, cy));
  }
}

TEST_CASE("impossible knobs raise a generation error")
{
  SuiteKnobs k;
  k.corridor_width = 1.0;  // narrower than the vehicle
  CHECK_THROWS_AS(generate_suite("corridor", 4, 1, k), GenerationError);
}

TEST_CASE("tight turns are still generable")
{
  SuiteKnobs k;
  k.turn_inner_radius = 2.0;
  CHECK(generate_suite("turn", 4, 2, k).scenarios.size() == 4);
}
