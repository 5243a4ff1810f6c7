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

#ifndef BSPLAN__WORLD_HPP_
#define BSPLAN__WORLD_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bsplan/geometry.hpp"
#include "bsplan/spline.hpp"

namespace bsplan
{

inline constexpr double kDefaultResolution = 0.2;
inline constexpr int kDefaultGridCells = 128;

/// Binary occupancy grid. Cell (cx, cy) covers the metric square
/// [cx*res, (cx+1)*res) x [cy*res, (cy+1)*res); x grows right, y grows up.
/// Storage is row-major with row cy = 0 first.
class OccupancyGrid
{
public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution = kDefaultResolution);
  OccupancyGrid(int width, int height, double resolution, std::vector<std::uint8_t> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double width_m() const { return width_ * resolution_; }
  double height_m() const { return height_ * resolution_; }
  const std::vector<std::uint8_t> & cells() const { return cells_; }

  bool in_grid(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width_ && cy < height_; }
  bool occupied(int cx, int cy) const { return cells_[static_cast<std::size_t>(cy) * width_ + cx] != 0; }
  void set(int cx, int cy, bool occ) { cells_[static_cast<std::size_t>(cy) * width_ + cx] = occ ? 1 : 0; }

  /// True for occupied cells and for every point outside the map.
  bool blocked_at(const Vec2 & p) const;
  std::array<int, 2> cell_of(const Vec2 & p) const;
  Vec2 cell_center(int cx, int cy) const { return Vec2{(cx + 0.5) * resolution_, (cy + 0.5) * resolution_}; }

  /// Marks every cell whose center lies inside the axis-aligned box.
  void fill_box(const Vec2 & lo, const Vec2 & hi);
  void fill_disc(const Vec2 & c, double radius);

  friend bool operator==(const OccupancyGrid &, const OccupancyGrid &) = default;

private:
  int width_{0};
  int height_{0};
  double resolution_{kDefaultResolution};
  double inv_resolution_{1.0 / kDefaultResolution};  // cell lookups multiply by this
  std::vector<std::uint8_t> cells_;
};

enum class GridFormat { text, pgm };

/// Text: rows of '.' (free) and '#' (occupied), first row is the top of the
/// map. PGM: P2 or P5 graymap, first row on top, pixel >= 50% of maxval is
/// occupied.
OccupancyGrid load_grid(std::istream & in, GridFormat format, double resolution = kDefaultResolution);
OccupancyGrid load_grid_file(const std::filesystem::path & path, double resolution = kDefaultResolution);
void write_grid(std::ostream & out, const OccupancyGrid & grid, GridFormat format);

struct VehicleParams
{
  double length{4.05};
  double width{1.72};
  double rear_axle_offset{0.4};  // rear bumper to guiding point, along the body
  double kappa_max{0.227};

  void validate() const;
  double half_diagonal() const;
  friend bool operator==(const VehicleParams &, const VehicleParams &) = default;
};

struct Footprint
{
  // rear-right, front-right, front-left, rear-left
  std::array<Vec2, 4> corners;
  Vec2 guide;

  /// The four corners followed by the guiding point.
  std::array<Vec2, 5> characteristic_points() const
  {
    return {corners[0], corners[1], corners[2], corners[3], guide};
  }
};

/// Characteristic points in the vehicle frame (guide at the origin, x along
/// the body), same order as Footprint::characteristic_points.
std::array<Vec2, 5> footprint_local_points(const VehicleParams & vehicle);

Footprint footprint_at(const Vec2 & position, double heading, const VehicleParams & vehicle);

/// 1 iff a point sampled on the rectangle's edges (spacing <= resolution/2)
/// falls into an occupied cell or outside the map.
int collision_indicator(const Footprint & fp, const OccupancyGrid & grid);

/// Euclidean distance field over cell centers, in meters.
class DistanceField
{
public:
  /// Distance from each cell center to the nearest occupied cell center.
  /// Cells of a map without obstacles get +infinity.
  static DistanceField to_obstacles(const OccupancyGrid & grid, Exec exec = Exec::parallel);
  /// Distance from each cell center to the nearest free cell center.
  static DistanceField to_free(const OccupancyGrid & grid, Exec exec = Exec::parallel);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double at(int cx, int cy) const { return values_[static_cast<std::size_t>(cy) * width_ + cx]; }
  const std::vector<double> & values() const { return values_; }

  /// Bilinear interpolation between cell centers, clamped at the border.
  /// Points outside the map add their Euclidean distance to the map box.
  double interpolate(const Vec2 & p, Vec2 * gradient = nullptr) const;

private:
  static DistanceField build(const OccupancyGrid & grid, bool sources_are_occupied, Exec exec);

  int width_{0};
  int height_{0};
  double resolution_{kDefaultResolution};
  std::vector<double> values_;
};

struct ReferencePath
{
  std::vector<Vec2> polyline;
};

/// Radius used to inflate obstacles for the reference search.
double inflation_radius(const VehicleParams & vehicle);

/// Cell-level freeness test for a disc of `inflation_radius` at p.
bool disc_free(const OccupancyGrid & grid, const DistanceField & obstacles, const Vec2 & p, double radius);

/// Shortest 8-connected path on the inflated grid, as a metric polyline that
/// starts at q0 and ends at qd. Empty optional when no path exists.
std::optional<ReferencePath> reference_path(
  const OccupancyGrid & grid, const Configuration & q0, const Configuration & qd,
  const VehicleParams & vehicle);

/// Minimum distance from p to the polyline. The optional gradient is the
/// unit vector from the nearest foot point to p (zero when p lies on it).
double distance_to_polyline(const Vec2 & p, const ReferencePath & path, Vec2 * gradient = nullptr);

enum class CheckMode {
  pruned,      // distance-field shortcuts, cost depends on the scene
  fixed_cost,  // every edge sample, no early exit
};

/// Collision queries for one grid and vehicle, accelerated by an obstacle
/// distance field. Answers always equal collision_indicator(footprint_at(...)).
class CollisionChecker
{
public:
  CollisionChecker(const OccupancyGrid & grid, const VehicleParams & vehicle, Exec exec = Exec::parallel);

  const OccupancyGrid & grid() const { return *grid_; }
  const VehicleParams & vehicle() const { return vehicle_; }
  const DistanceField & obstacle_distance() const { return obstacles_; }

  bool collides(const Vec2 & guide, double heading) const;
  /// Same answer as collides() for the same amount of work in every pose.
  bool collides_fixed_cost(const Vec2 & guide, double heading) const;
  bool collides(const Vec2 & guide, double heading, CheckMode mode) const
  {
    return mode == CheckMode::pruned ? collides(guide, heading) : collides_fixed_cost(guide, heading);
  }

private:
  bool edge_blocked(const Vec2 & a, const Vec2 & edge, std::size_t n, std::size_t j0, std::size_t j1) const;

  const OccupancyGrid * grid_;
  VehicleParams vehicle_;
  DistanceField obstacles_;
  double center_offset_;  // guide -> rectangle center, along the heading
  double safe_radius_;
  std::vector<std::vector<double>> fractions_;  // [n][j] = j / n
};

}  // namespace bsplan

#endif  // BSPLAN__WORLD_HPP_
