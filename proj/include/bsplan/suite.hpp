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

#ifndef BSPLAN__SUITE_HPP_
#define BSPLAN__SUITE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bsplan/scenario.hpp"

namespace bsplan
{

/// Generator kinds: empty, corridor, turn, parking, obstacle-field, plus the
/// round-robin mixes "easy" (empty, corridor) and "mixed" (turn, obstacle-field).
struct SuiteKnobs
{
  double corridor_width{6.0};       // m
  double turn_inner_radius{5.5};    // m, inner wall radius of the bend
  double turn_road_width{6.0};      // m
  int obstacle_count{3};            // obstacle-field
  double obstacle_max_size{2.6};    // m, largest box side / disc diameter
  double endpoint_clearance{4.0};   // m, obstacle-field: free radius around start and goal
  double parking_bay_width{3.2};    // m
  // A draft is kept only if a reference path still exists when obstacles are
  // inflated by this radius (never less than half the vehicle width).
  double min_clearance{0.0};        // m
  int grid_cells{kDefaultGridCells};
  double resolution{kDefaultResolution};
};

struct GenerationError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

bool is_known_kind(const std::string & kind);

/// Deterministic for a fixed (kind, count, seed, knobs). Scenarios whose
/// start or goal footprint collides, or that have no reference path with
/// the requested clearance, are resampled; a yield below 10% after 50 attempts raises GenerationError.
ScenarioSuite generate_suite(
  const std::string & kind, std::size_t count, std::uint64_t seed, const SuiteKnobs & knobs = {},
  const VehicleParams & vehicle = {});

}  // namespace bsplan

#endif  // BSPLAN__SUITE_HPP_
