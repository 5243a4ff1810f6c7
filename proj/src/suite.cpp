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

#include "bsplan/suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace bsplan
{

namespace
{

constexpr double kPi = std::numbers::pi;

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53); }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return (engine_() >> 63) != 0; }

private:
  std::mt19937_64 engine_;
};

struct Draft
{
  OccupancyGrid grid;
  Configuration q0;
  Configuration qd;
};

OccupancyGrid blank(const SuiteKnobs & k) { return OccupancyGrid(k.grid_cells, k.grid_cells, k.resolution); }

// Start on the left, goal 13-18 m ahead with a moderate lateral offset.
void open_endpoints(Rng & rng, const OccupancyGrid & grid, Draft & d)
{
  const double side = grid.height_m();
  d.q0 = Configuration{rng.uniform(2.0, 4.0), rng.uniform(0.32 * side, 0.68 * side), rng.uniform(-0.3, 0.3),
                       rng.uniform(-0.05, 0.05)};
  const double dist = rng.uniform(13.0, 18.0);
  const double bearing = d.q0.theta + rng.uniform(-0.3, 0.3);
  d.qd = Configuration{d.q0.x + dist * std::cos(bearing), d.q0.y + dist * std::sin(bearing),
                       bearing + rng.uniform(-0.4, 0.4), 0.0};
}

Draft make_empty(Rng & rng, const SuiteKnobs & k)
{
  Draft d{blank(k), {}, {}};
  open_endpoints(rng, d.grid, d);
  return d;
}

Draft make_corridor(Rng & rng, const SuiteKnobs & k)
{
  Draft d{blank(k), {}, {}};
  const double side = d.grid.width_m();
  const double half = 0.5 * k.corridor_width;
  const double yc = rng.uniform(half + 2.0, side - half - 2.0);
  d.grid.fill_box({0.0, 0.0}, {side, yc - half});
  d.grid.fill_box({0.0, yc + half}, {side, side});
  const double lateral = std::max(0.0, half - 2.2);
  d.q0 = Configuration{rng.uniform(2.0, 3.5), yc + rng.uniform(-lateral, lateral), rng.uniform(-0.12, 0.12), 0.0};
  d.qd = Configuration{rng.uniform(17.0, 21.0), yc + rng.uniform(-lateral, lateral), rng.uniform(-0.12, 0.12), 0.0};
  return d;
}

void mirror_y(Draft & d)
{
  const OccupancyGrid src = d.grid;
  const int h = src.height();
  for (int cy = 0; cy < h; ++cy) {
    for (int cx = 0; cx < src.width(); ++cx) {
      d.grid.set(cx, cy, src.occupied(cx, h - 1 - cy));
    }
  }
  const double hm = src.height_m();
  for (Configuration * q : {&d.q0, &d.qd}) {
    q->y = hm - q->y;
    q->theta = -q->theta;
    q->kappa = -q->kappa;
  }
}

// A straight leg along +x, a quarter bend to the left and a leg along +y.
// Mirrored half of the time into a right turn.
Draft make_turn(Rng & rng, const SuiteKnobs & k)
{
  Draft d{blank(k), {}, {}};
  const double side = d.grid.width_m();
  const double r_in = std::max(0.5, k.turn_inner_radius + rng.uniform(-0.5, 0.8));
  const double width = k.turn_road_width + rng.uniform(-0.3, 0.6);
  const double r_out = r_in + width;
  const double r_mid = r_in + 0.5 * width;
  const double cy = r_out + rng.uniform(0.6, 1.6);
  const double cx = std::min(side - r_out - 0.6, rng.uniform(9.0, 12.5));
  for (int gy = 0; gy < d.grid.height(); ++gy) {
    for (int gx = 0; gx < d.grid.width(); ++gx) {
      const Vec2 c = d.grid.cell_center(gx, gy);
      bool road = false;
      if (c.x <= cx) {
        road = c.y >= cy - r_out && c.y <= cy - r_in;
      } else if (c.y >= cy) {
        road = c.x >= cx + r_in && c.x <= cx + r_out;
      } else {
        const double r = norm(c - Vec2{cx, cy});
        road = r >= r_in && r <= r_out;
      }
      d.grid.set(gx, gy, !road);
    }
  }
  const double lateral = std::max(0.0, 0.5 * width - 1.8);
  d.q0 = Configuration{rng.uniform(2.0, 3.5), cy - r_mid + rng.uniform(-lateral, lateral), rng.uniform(-0.1, 0.1), 0.0};
  d.qd = Configuration{cx + r_mid + rng.uniform(-lateral, lateral), rng.uniform(cy + 3.0, side - 4.2),
                       0.5 * kPi + rng.uniform(-0.1, 0.1), 0.0};
  if (rng.coin()) {
    mirror_y(d);
  }
  return d;
}

// Drive along a road and turn left into a free bay between parked cars.
Draft make_parking(Rng & rng, const SuiteKnobs & k)
{
  Draft d{blank(k), {}, {}};
  const double side = d.grid.width_m();
  const double road_lo = rng.uniform(1.0, 2.0);
  const double road_hi = road_lo + rng.uniform(7.5, 8.5);
  const double bay_depth = 5.5;
  d.grid.fill_box({0.0, 0.0}, {side, road_lo});
  d.grid.fill_box({0.0, road_hi + bay_depth}, {side, side});
  const double bay = k.parking_bay_width;
  const int free_bay = rng.integer(4, 6);
  const double x_first = rng.uniform(0.0, 0.4 * bay);
  for (int b = 0; x_first + b * bay < side; ++b) {
    const double x0 = x_first + b * bay;
    if (b == free_bay) {
      d.qd = Configuration{x0 + 0.5 * bay + rng.uniform(-0.15, 0.15), road_hi + 1.2, 0.5 * kPi, 0.0};
      continue;
    }
    // parked car occupying most of the bay, or an empty bay marked by a kerb stone
    if (rng.uniform(0.0, 1.0) < 0.8) {
      d.grid.fill_box({x0 + 0.35, road_hi + 0.3}, {x0 + bay - 0.35, road_hi + bay_depth});
    } else {
      d.grid.fill_box({x0 - 0.1, road_hi + 2.5}, {x0 + 0.1, road_hi + bay_depth});
    }
  }
  d.q0 = Configuration{rng.uniform(2.0, 3.5), road_lo + rng.uniform(2.2, 3.2), rng.uniform(-0.08, 0.08), 0.0};
  return d;
}

Draft make_obstacle_field(Rng & rng, const SuiteKnobs & k)
{
  Draft d{blank(k), {}, {}};
  open_endpoints(rng, d.grid, d);
  const Vec2 a = d.q0.position();
  const Vec2 b = d.qd.position();
  int placed = 0;
  for (int tries = 0; placed < k.obstacle_count && tries < 20 * std::max(1, k.obstacle_count); ++tries) {
    // Bias obstacles toward the middle of the start-goal corridor so they
    // matter, but keep the ends drivable.
    const double t = rng.uniform(0.25, 0.75);
    const Vec2 c = a + (b - a) * t + Vec2{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    const bool box = rng.coin();
    const double w = rng.uniform(0.6, k.obstacle_max_size);
    const double h = box ? rng.uniform(0.6, k.obstacle_max_size) : w;
    const double reach = 0.5 * std::hypot(w, h);
    if (std::min(norm(c - a), norm(c - b)) - reach < k.endpoint_clearance) {
      continue;
    }
    if (box) {
      d.grid.fill_box(c - Vec2{0.5 * w, 0.5 * h}, c + Vec2{0.5 * w, 0.5 * h});
    } else {
      d.grid.fill_disc(c, 0.5 * w);
    }
    ++placed;
  }
  return d;
}

Draft make_draft(const std::string & kind, Rng & rng, const SuiteKnobs & k)
{
  if (kind == "empty") {
    return make_empty(rng, k);
  }
  if (kind == "corridor") {
    return make_corridor(rng, k);
  }
  if (kind == "turn") {
    return make_turn(rng, k);
  }
  if (kind == "parking") {
    return make_parking(rng, k);
  }
  if (kind == "obstacle-field") {
    return make_obstacle_field(rng, k);
  }
  throw ContractError("unknown scenario kind '" + kind + "'");
}

std::vector<std::string> components(const std::string & kind)
{
  if (kind == "easy") {
    return {"empty", "corridor"};
  }
  if (kind == "mixed") {
    return {"turn", "obstacle-field"};
  }
  return {kind};
}

bool acceptable(const Draft & d, const VehicleParams & vehicle, double min_clearance)
{
  if (std::abs(d.q0.kappa) > vehicle.kappa_max || norm(d.qd.position() - d.q0.position()) < 1.0) {
    return false;
  }
  for (const auto & q : {d.q0, d.qd}) {
    if (collision_indicator(footprint_at(q.position(), q.theta, vehicle), d.grid)) {
      return false;
    }
  }
  if (!reference_path(d.grid, d.q0, d.qd, vehicle).has_value()) {
    return false;
  }
  if (min_clearance <= inflation_radius(vehicle)) {
    return true;
  }
  // same search with a wider body, only to judge the draft
  VehicleParams wide = vehicle;
  wide.width = 2.0 * min_clearance;
  wide.length = std::max(wide.length, wide.width);
  return reference_path(d.grid, d.q0, d.qd, wide).has_value();
}

}  // namespace

bool is_known_kind(const std::string & kind)
{
  static const std::array<const char *, 7> kinds{"empty", "corridor", "turn", "parking", "obstacle-field", "easy",
                                                 "mixed"};
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

ScenarioSuite generate_suite(
  const std::string & kind, std::size_t count, std::uint64_t seed, const SuiteKnobs & knobs,
  const VehicleParams & vehicle)
{
  if (count < 1) {
    throw ContractError("suite size must be at least 1");
  }
  if (!is_known_kind(kind)) {
    throw ContractError("unknown scenario kind '" + kind + "'");
  }
  vehicle.validate();
  const auto parts = components(kind);
  Rng rng(seed);
  ScenarioSuite suite;
  suite.name = kind + "-" + std::to_string(seed);
  suite.kind = kind;
  suite.seed = seed;
  std::size_t attempts = 0;
  while (suite.scenarios.size() < count) {
    const std::string & part = parts[suite.scenarios.size() % parts.size()];
    Draft d = make_draft(part, rng, knobs);
    ++attempts;
    if (acceptable(d, vehicle, knobs.min_clearance)) {
      Scenario s;
      s.id = part + "-" + std::to_string(suite.scenarios.size());
      s.kind = part;
      s.grid = std::make_shared<const OccupancyGrid>(std::move(d.grid));
      s.q0 = d.q0;
      s.qd = d.qd;
      suite.scenarios.push_back(std::move(s));
    }
    if (attempts >= 50 && 10 * suite.scenarios.size() < attempts) {
      std::ostringstream msg;
      msg << "scenario generation for '" << kind << "' accepted " << suite.scenarios.size() << " of " << attempts
          << " drafts (< 10%); relax the knobs (corridor/road width, obstacle count)";
      throw GenerationError(msg.str());
    }
  }
  return suite;
}

}  // namespace bsplan
