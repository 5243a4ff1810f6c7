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

#include "bsplan/render.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "bsplan/losses.hpp"

namespace bsplan
{

namespace
{

class Canvas
{
public:
  Canvas(std::ostream & out, double scale, double height_m) : out_(out), scale_(scale), height_m_(height_m) {}

  std::string x(double v) const { return num(v * scale_); }
  std::string y(double v) const { return num((height_m_ - v) * scale_); }
  std::string len(double v) const { return num(v * scale_); }

  void polyline(const std::vector<Vec2> & pts, const char * stroke, double width, const char * extra = "")
  {
    if (pts.empty()) {
      return;
    }
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"" << extra
         << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out_ << (i ? " " : "") << x(pts[i].x) << ',' << y(pts[i].y);
    }
    out_ << "\"/>\n";
  }

  void polygon(const std::array<Vec2, 4> & pts, const char * stroke)
  {
    out_ << "<polygon fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"0.8\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out_ << (i ? " " : "") << x(pts[i].x) << ',' << y(pts[i].y);
    }
    out_ << "\"/>\n";
  }

  void circle(const Vec2 & c, double r_px, const char * fill)
  {
    out_ << "<circle cx=\"" << x(c.x) << "\" cy=\"" << y(c.y) << "\" r=\"" << num(r_px) << "\" fill=\"" << fill
         << "\"/>\n";
  }

  static std::string num(double v)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

private:
  std::ostream & out_;
  double scale_;
  double height_m_;
};

}  // namespace

void render_svg(
  std::ostream & out, const PlanResult & result, const PlanningContext & ctx, const PathModel & model,
  const RenderOptions & opts)
{
  if (result.polygon.size() != model.num_points()) {
    throw ContractError("plan result does not match the path model");
  }
  const OccupancyGrid & grid = ctx.grid();
  const double s = opts.pixels_per_meter;
  Canvas c(out, s, grid.height_m());
  const double res = grid.resolution();

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Canvas::num(grid.width_m() * s) << "\" height=\""
      << Canvas::num(grid.height_m() * s) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // occupied cells, merged into horizontal runs
  out << "<g fill=\"#444\">\n";
  for (int cy = 0; cy < grid.height(); ++cy) {
    int cx = 0;
    while (cx < grid.width()) {
      if (!grid.occupied(cx, cy)) {
        ++cx;
        continue;
      }
      const int start = cx;
      while (cx < grid.width() && grid.occupied(cx, cy)) {
        ++cx;
      }
      out << "<rect x=\"" << c.x(start * res) << "\" y=\"" << c.y((cy + 1) * res) << "\" width=\""
          << c.len((cx - start) * res) << "\" height=\"" << c.len(res) << "\"/>\n";
    }
  }
  out << "</g>\n";

  if (ctx.reference) {
    c.polyline(ctx.reference->polyline, "#3b7dd8", 1.5, " stroke-dasharray=\"6 4\"");
  }

  // control polygon and tree edges
  c.polyline(result.polygon, "#bbbbbb", 1.0);
  for (const auto & node : model.layout.nodes) {
    const Vec2 & p = result.polygon[node.index];
    c.polyline({result.polygon[node.left], p, result.polygon[node.right]}, "#e0a030", 0.7, " stroke-dasharray=\"2 2\"");
  }
  for (const auto & p : result.polygon) {
    c.circle(p, 3.0, "#e0a030");
  }

  const bool ok = result.verdict.feasible;
  const char * path_color = ok ? "#2a9d3a" : "#d03030";
  if (!result.samples.positions.empty()) {
    const auto headings = sample_headings(result.samples);
    const PathSamples & ps = result.samples;
    for (std::size_t i = 0; i < ps.size(); i += std::max<std::size_t>(1, opts.footprint_every)) {
      const Footprint fp = footprint_at(ps.positions[i], headings[i], ctx.vehicle);
      c.polygon(fp.corners, ok ? "#8fd19e" : "#f0a0a0");
    }
    c.polyline(ps.positions, path_color, 2.0);
    if (!ok) {
      out << "<g class=\"violations\">\n";
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const bool bad_kappa = std::abs(ps.curvature[i]) > ctx.vehicle.kappa_max + 1e-9;
        const bool bad_coll = ctx.checker && ctx.checker->collides(ps.positions[i], headings[i]);
        if (bad_kappa || bad_coll || ps.degenerate[i]) {
          c.circle(ps.positions[i], 2.0, bad_coll ? "#d03030" : "#9030d0");
        }
      }
      out << "</g>\n";
    }
  }
  c.circle(ctx.scenario.q0.position(), 4.0, "#000000");
  c.circle(ctx.scenario.qd.position(), 4.0, "#3b7dd8");
  out << "</svg>\n";
}

void render_svg(
  const std::filesystem::path & path, const PlanResult & result, const PlanningContext & ctx, const PathModel & model,
  const RenderOptions & opts)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  render_svg(out, result, ctx, model, opts);
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace bsplan
