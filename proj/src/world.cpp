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

#include "bsplan/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "bsplan/kernels.hpp"

namespace bsplan
{

OccupancyGrid::OccupancyGrid(int width, int height, double resolution)
  : OccupancyGrid(width, height, resolution,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0))
{
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, std::vector<std::uint8_t> cells)
  : width_(width),
    height_(height),
    resolution_(resolution),
    inv_resolution_(1.0 / resolution),
    cells_(std::move(cells))
{
  if (width_ <= 0 || height_ <= 0) {
    throw ContractError("grid dimensions must be positive");
  }
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw ContractError("grid resolution must be positive");
  }
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ContractError("grid cell count does not match width*height");
  }
  for (auto & c : cells_) {
    c = c ? 1 : 0;
  }
}

std::array<int, 2> OccupancyGrid::cell_of(const Vec2 & p) const
{
  return {static_cast<int>(std::floor(p.x * inv_resolution_)), static_cast<int>(std::floor(p.y * inv_resolution_))};
}

bool OccupancyGrid::blocked_at(const Vec2 & p) const
{
  if (!(p.x >= 0.0 && p.y >= 0.0)) {
    return true;
  }
  const auto [cx, cy] = cell_of(p);
  return !in_grid(cx, cy) || occupied(cx, cy);
}

void OccupancyGrid::fill_box(const Vec2 & lo, const Vec2 & hi)
{
  for (int cy = 0; cy < height_; ++cy) {
    for (int cx = 0; cx < width_; ++cx) {
      const Vec2 c = cell_center(cx, cy);
      if (c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y) {
        set(cx, cy, true);
      }
    }
  }
}

void OccupancyGrid::fill_disc(const Vec2 & center, double radius)
{
  for (int cy = 0; cy < height_; ++cy) {
    for (int cx = 0; cx < width_; ++cx) {
      if (norm(cell_center(cx, cy) - center) <= radius) {
        set(cx, cy, true);
      }
    }
  }
}

namespace
{

std::string next_pgm_token(std::istream & in)
{
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) {
        return tok;
      }
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) {
    throw ParseError("pgm: unexpected end of header");
  }
  return tok;
}

int parse_positive(const std::string & tok, const char * what)
{
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception &) {
    throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
  if (used != tok.size() || v <= 0 || v > 1 << 20) {
    throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
  return static_cast<int>(v);
}

OccupancyGrid load_text(std::istream & in, double resolution)
{
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    for (char c : line) {
      if (c != '.' && c != '#') {
        throw ParseError(std::string("text grid: unexpected character '") + c + "'");
      }
    }
    if (!rows.empty() && line.size() != rows.front().size()) {
      throw ParseError("text grid: rows have different widths");
    }
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw ParseError("text grid: no rows");
  }
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  OccupancyGrid grid(width, height, resolution);
  for (int r = 0; r < height; ++r) {
    for (int cx = 0; cx < width; ++cx) {
      grid.set(cx, height - 1 - r, rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(cx)] == '#');
    }
  }
  return grid;
}

OccupancyGrid load_pgm(std::istream & in, double resolution)
{
  const std::string magic = next_pgm_token(in);
  if (magic != "P2" && magic != "P5") {
    throw ParseError("pgm: unsupported magic '" + magic + "'");
  }
  const int width = parse_positive(next_pgm_token(in), "width");
  const int height = parse_positive(next_pgm_token(in), "height");
  const int maxval = parse_positive(next_pgm_token(in), "maxval");
  if (maxval > 65535) {
    throw ParseError("pgm: maxval above 65535");
  }
  OccupancyGrid grid(width, height, resolution);
  auto occupied = [maxval](long v) {
    if (v < 0 || v > maxval) {
      throw ParseError("pgm: pixel value out of range");
    }
    return 2 * v >= maxval;
  };
  for (int r = 0; r < height; ++r) {
    for (int cx = 0; cx < width; ++cx) {
      long v = 0;
      if (magic == "P2") {
        std::string tok;
        if (!(in >> tok)) {
          throw ParseError("pgm: fewer pixels than width*height");
        }
        try {
          std::size_t used = 0;
          v = std::stol(tok, &used);
          if (used != tok.size()) {
            throw ParseError("pgm: bad pixel '" + tok + "'");
          }
        } catch (const std::logic_error &) {
          throw ParseError("pgm: bad pixel '" + tok + "'");
        }
      } else {
        unsigned char b[2] = {0, 0};
        const std::streamsize n = maxval < 256 ? 1 : 2;
        if (!in.read(reinterpret_cast<char *>(b), n)) {
          throw ParseError("pgm: fewer pixels than width*height");
        }
        v = n == 1 ? b[0] : (static_cast<long>(b[0]) << 8) | b[1];
      }
      grid.set(cx, height - 1 - r, occupied(v));
    }
  }
  if (magic == "P2") {
    std::string extra;
    if (in >> extra) {
      throw ParseError("pgm: more pixels than width*height");
    }
  }
  return grid;
}

}  // namespace

OccupancyGrid load_grid(std::istream & in, GridFormat format, double resolution)
{
  return format == GridFormat::text ? load_text(in, resolution) : load_pgm(in, resolution);
}

OccupancyGrid load_grid_file(const std::filesystem::path & path, double resolution)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open grid file " + path.string());
  }
  const auto ext = path.extension().string();
  const GridFormat format = (ext == ".pgm" || ext == ".PGM") ? GridFormat::pgm : GridFormat::text;
  return load_grid(in, format, resolution);
}

void write_grid(std::ostream & out, const OccupancyGrid & grid, GridFormat format)
{
  if (format == GridFormat::text) {
    for (int cy = grid.height() - 1; cy >= 0; --cy) {
      std::string row(static_cast<std::size_t>(grid.width()), '.');
      for (int cx = 0; cx < grid.width(); ++cx) {
        if (grid.occupied(cx, cy)) {
          row[static_cast<std::size_t>(cx)] = '#';
        }
      }
      out << row << '\n';
    }
    return;
  }
  out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
  for (int cy = grid.height() - 1; cy >= 0; --cy) {
    for (int cx = 0; cx < grid.width(); ++cx) {
      out.put(grid.occupied(cx, cy) ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
}

void VehicleParams::validate() const
{
  const bool ok = length > 0.0 && width > 0.0 && rear_axle_offset > 0.0 && rear_axle_offset < length &&
                  kappa_max > 0.0 && std::isfinite(length) && std::isfinite(width) && std::isfinite(kappa_max);
  if (!ok) {
    throw ContractError("vehicle parameters must be positive with rear_axle_offset < length");
  }
}

double VehicleParams::half_diagonal() const { return 0.5 * std::hypot(length, width); }

std::array<Vec2, 5> footprint_local_points(const VehicleParams & v)
{
  const double rear = -v.rear_axle_offset;
  const double front = v.length - v.rear_axle_offset;
  const double half_w = 0.5 * v.width;
  return {Vec2{rear, -half_w}, Vec2{front, -half_w}, Vec2{front, half_w}, Vec2{rear, half_w}, Vec2{0.0, 0.0}};
}

Footprint footprint_at(const Vec2 & position, double heading, const VehicleParams & vehicle)
{
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const auto local = footprint_local_points(vehicle);
  Footprint fp;
  for (std::size_t k = 0; k < 4; ++k) {
    fp.corners[k] = position + Vec2{c * local[k].x - s * local[k].y, s * local[k].x + c * local[k].y};
  }
  fp.guide = position;
  return fp;
}

namespace
{

// Sample points of one footprint edge; shared with the checker so both
// visit exactly the same points.
std::size_t edge_samples(const Vec2 & edge, double resolution)
{
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(norm(edge) / (0.5 * resolution))));
}

Vec2 edge_point(const Vec2 & a, const Vec2 & edge, std::size_t j, std::size_t n)
{
  return a + edge * (static_cast<double>(j) / static_cast<double>(n));
}

}  // namespace

int collision_indicator(const Footprint & fp, const OccupancyGrid & grid)
{
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2 a = fp.corners[k];
    const Vec2 edge = fp.corners[(k + 1) % 4] - a;
    const std::size_t n = edge_samples(edge, grid.resolution());
    for (std::size_t j = 0; j < n; ++j) {
      if (grid.blocked_at(edge_point(a, edge, j, n))) {
        return 1;
      }
    }
  }
  return 0;
}

DistanceField DistanceField::to_obstacles(const OccupancyGrid & grid, Exec exec) { return build(grid, true, exec); }

DistanceField DistanceField::to_free(const OccupancyGrid & grid, Exec exec) { return build(grid, false, exec); }

DistanceField DistanceField::build(const OccupancyGrid & grid, bool sources_are_occupied, Exec exec)
{
  std::vector<std::uint8_t> sources(grid.cells().size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    sources[i] = (grid.cells()[i] != 0) == sources_are_occupied ? 1 : 0;
  }
  DistanceField field;
  field.width_ = grid.width();
  field.height_ = grid.height();
  field.resolution_ = grid.resolution();
  field.values_.resize(sources.size());
  kernels::squared_edt(exec, sources, grid.width(), grid.height(), field.values_);
  for (auto & v : field.values_) {
    v = std::sqrt(v) * grid.resolution();
  }
  return field;
}

double DistanceField::interpolate(const Vec2 & p, Vec2 * gradient) const
{
  const double res = resolution_;
  const Vec2 box_hi{width_ * res, height_ * res};
  const Vec2 in_box{std::clamp(p.x, 0.0, box_hi.x), std::clamp(p.y, 0.0, box_hi.y)};
  const Vec2 outside = p - in_box;
  const double outside_dist = norm(outside);

  const double u_raw = in_box.x / res - 0.5;
  const double v_raw = in_box.y / res - 0.5;
  const double u = std::clamp(u_raw, 0.0, static_cast<double>(width_ - 1));
  const double v = std::clamp(v_raw, 0.0, static_cast<double>(height_ - 1));
  const int x0 = std::min(static_cast<int>(u), std::max(width_ - 2, 0));
  const int y0 = std::min(static_cast<int>(v), std::max(height_ - 2, 0));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double f00 = at(x0, y0);
  const double f10 = at(x1, y0);
  const double f01 = at(x0, y1);
  const double f11 = at(x1, y1);
  const double value = (1 - fx) * (1 - fy) * f00 + fx * (1 - fy) * f10 + (1 - fx) * fy * f01 + fx * fy * f11;

  if (gradient != nullptr) {
    Vec2 g{((1 - fy) * (f10 - f00) + fy * (f11 - f01)) / res, ((1 - fx) * (f01 - f00) + fx * (f11 - f10)) / res};
    if (u != u_raw || outside.x != 0.0) {
      g.x = 0.0;
    }
    if (v != v_raw || outside.y != 0.0) {
      g.y = 0.0;
    }
    if (outside_dist > 0.0) {
      g += outside / outside_dist;
    }
    *gradient = g;
  }
  return value + outside_dist;
}

double inflation_radius(const VehicleParams & vehicle) { return 0.5 * vehicle.width; }

bool disc_free(const OccupancyGrid & grid, const DistanceField & obstacles, const Vec2 & p, double radius)
{
  if (!(p.x >= 0.0 && p.y >= 0.0)) {
    return false;
  }
  const auto [cx, cy] = grid.cell_of(p);
  if (!grid.in_grid(cx, cy) || grid.occupied(cx, cy)) {
    return false;
  }
  const Vec2 c = grid.cell_center(cx, cy);
  const double border = std::min({c.x, c.y, grid.width_m() - c.x, grid.height_m() - c.y});
  return border >= radius && obstacles.at(cx, cy) >= radius;
}

std::optional<ReferencePath> reference_path(
  const OccupancyGrid & grid, const Configuration & q0, const Configuration & qd, const VehicleParams & vehicle)
{
  const DistanceField obstacles = DistanceField::to_obstacles(grid);
  const double radius = inflation_radius(vehicle);
  if (!disc_free(grid, obstacles, q0.position(), radius) || !disc_free(grid, obstacles, qd.position(), radius)) {
    return std::nullopt;
  }
  const int w = grid.width();
  const int h = grid.height();
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::uint8_t> passable(n, 0);
  for (int cy = 0; cy < h; ++cy) {
    for (int cx = 0; cx < w; ++cx) {
      passable[static_cast<std::size_t>(cy) * w + cx] = disc_free(grid, obstacles, grid.cell_center(cx, cy), radius);
    }
  }
  const auto [sx, sy] = grid.cell_of(q0.position());
  const auto [gx, gy] = grid.cell_of(qd.position());
  const std::size_t start = static_cast<std::size_t>(sy) * w + sx;
  const std::size_t goal = static_cast<std::size_t>(gy) * w + gx;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g_cost(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  auto heuristic = [&](std::size_t idx) {
    const double dx = std::abs(static_cast<double>(static_cast<int>(idx % w) - gx));
    const double dy = std::abs(static_cast<double>(static_cast<int>(idx / w) - gy));
    return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
  };
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g_cost[start] = 0.0;
  open.emplace(heuristic(start), start);
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (closed[cur]) {
      continue;
    }
    closed[cur] = 1;
    if (cur == goal) {
      break;
    }
    const int cx = static_cast<int>(cur % w);
    const int cy = static_cast<int>(cur / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) {
          continue;
        }
        const int nx = cx + dx;
        const int ny = cy + dy;
        if (!grid.in_grid(nx, ny)) {
          continue;
        }
        const std::size_t nb = static_cast<std::size_t>(ny) * w + nx;
        if (!passable[nb] || closed[nb]) {
          continue;
        }
        const double step = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
        if (g_cost[cur] + step < g_cost[nb]) {
          g_cost[nb] = g_cost[cur] + step;
          parent[nb] = cur;
          open.emplace(g_cost[nb] + heuristic(nb), nb);
        }
      }
    }
  }
  if (!closed[goal]) {
    return std::nullopt;
  }

  std::vector<std::size_t> cells;
  for (std::size_t c = goal; c != n; c = parent[c]) {
    cells.push_back(c);
    if (c == start) {
      break;
    }
  }
  std::reverse(cells.begin(), cells.end());

  ReferencePath path;
  path.polyline.push_back(q0.position());
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
    const auto dir = [&](std::size_t a, std::size_t b) {
      return std::pair{static_cast<int>(b % w) - static_cast<int>(a % w), static_cast<int>(b / w) - static_cast<int>(a / w)};
    };
    if (dir(cells[i - 1], cells[i]) != dir(cells[i], cells[i + 1])) {
      path.polyline.push_back(grid.cell_center(static_cast<int>(cells[i] % w), static_cast<int>(cells[i] / w)));
    }
  }
  path.polyline.push_back(qd.position());
  return path;
}

double distance_to_polyline(const Vec2 & p, const ReferencePath & path, Vec2 * gradient)
{
  const auto & pts = path.polyline;
  if (pts.empty()) {
    throw ContractError("distance_to_polyline: empty polyline");
  }
  Vec2 foot = pts.front();
  double best2 = dot(p - foot, p - foot);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 f = a + ab * t;
    const double d2 = dot(p - f, p - f);
    if (d2 < best2) {
      best2 = d2;
      foot = f;
    }
  }
  const double best = std::sqrt(best2);
  if (gradient != nullptr) {
    *gradient = best > 0.0 ? (p - foot) / best : Vec2{};
  }
  return best;
}

CollisionChecker::CollisionChecker(const OccupancyGrid & grid, const VehicleParams & vehicle, Exec exec)
  : grid_(&grid),
    vehicle_(vehicle),
    obstacles_(DistanceField::to_obstacles(grid, exec)),
    center_offset_(0.5 * vehicle.length - vehicle.rear_axle_offset),
    safe_radius_(vehicle.half_diagonal() + std::sqrt(2.0) * grid.resolution())
{
  vehicle_.validate();
  // sample counts of both edge lengths, with slack for rounding of rotated edges
  const std::size_t longest = edge_samples({std::max(vehicle.length, vehicle.width), 0.0}, grid.resolution()) + 2;
  fractions_.resize(longest + 1);
  for (std::size_t n = 1; n <= longest; ++n) {
    for (std::size_t j = 0; j < n; ++j) {
      fractions_[n].push_back(static_cast<double>(j) / static_cast<double>(n));
    }
  }
}

bool CollisionChecker::collides_fixed_cost(const Vec2 & guide, double heading) const
{
  // Branch-free replica of collision_indicator. Scaled coordinates are
  // compared against the grid size, which for non-negative values is the
  // same test as blocked_at.
  const Footprint fp = footprint_at(guide, heading, vehicle_);
  const double inv = 1.0 / grid_->resolution();
  const double w = grid_->width();
  const double h = grid_->height();
  const auto stride = static_cast<std::size_t>(grid_->width());
  const std::uint8_t * cells = grid_->cells().data();
  unsigned hit = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2 a = fp.corners[k];
    const Vec2 edge = fp.corners[(k + 1) % 4] - a;
    const std::size_t n = edge_samples(edge, grid_->resolution());
    if (n >= fractions_.size()) {
      hit |= collision_indicator(fp, *grid_);
      continue;
    }
    for (const double t : fractions_[n]) {
      const Vec2 p = a + edge * t;
      const double x = p.x * inv;
      const double y = p.y * inv;
      const bool in = x >= 0.0 && y >= 0.0 && x < w && y < h;
      const std::size_t idx = in ? static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x) : 0;
      hit |= in ? cells[idx] : 1u;
    }
  }
  return hit != 0;
}

bool CollisionChecker::collides(const Vec2 & guide, double heading) const
{
  const Vec2 center = guide + unit_from_angle(heading) * center_offset_;
  const double half_diag = vehicle_.half_diagonal();
  const auto [cx, cy] = grid_->cell_of(center);
  if (grid_->in_grid(cx, cy)) {
    const double border = std::min({center.x, center.y, grid_->width_m() - center.x, grid_->height_m() - center.y});
    if (border > half_diag && obstacles_.at(cx, cy) > safe_radius_) {
      return false;
    }
  }
  const Footprint fp = footprint_at(guide, heading, vehicle_);
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2 a = fp.corners[k];
    const Vec2 edge = fp.corners[(k + 1) % 4] - a;
    const std::size_t n = edge_samples(edge, grid_->resolution());
    if (edge_blocked(a, edge, n, 0, n)) {
      return true;
    }
  }
  return false;
}

// Samples j0..j1-1 of an edge. A run whose midpoint cell is farther from
// every obstacle than the run's half length (plus two half cell diagonals)
// cannot touch an occupied cell, as long as the run lies inside the map.
bool CollisionChecker::edge_blocked(const Vec2 & a, const Vec2 & edge, std::size_t n, std::size_t j0, std::size_t j1) const
{
  if (j1 - j0 <= 4) {
    for (std::size_t j = j0; j < j1; ++j) {
      if (grid_->blocked_at(edge_point(a, edge, j, n))) {
        return true;
      }
    }
    return false;
  }
  const Vec2 p = edge_point(a, edge, j0, n);
  const Vec2 q = edge_point(a, edge, j1 - 1, n);
  const auto [px, py] = grid_->cell_of(p);
  const auto [qx, qy] = grid_->cell_of(q);
  if (grid_->in_grid(px, py) && grid_->in_grid(qx, qy)) {
    const Vec2 c = 0.5 * (p + q);
    const auto [cx, cy] = grid_->cell_of(c);
    const double reach = 0.5 * norm(q - p) + std::sqrt(2.0) * grid_->resolution() + 1e-9;
    if (obstacles_.at(cx, cy) > reach) {
      return false;
    }
  }
  // probe the middle sample first so colliding edges exit early
  const std::size_t mid = j0 + (j1 - j0) / 2;
  if (grid_->blocked_at(edge_point(a, edge, mid, n))) {
    return true;
  }
  return edge_blocked(a, edge, n, j0, mid) || edge_blocked(a, edge, n, mid, j1);
}

}  // namespace bsplan
