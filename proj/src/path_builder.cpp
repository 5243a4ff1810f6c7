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

#include "bsplan/path_builder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace bsplan
{

namespace
{

void check_depth(int depth)
{
  if (depth < 1 || depth > 16) {
    throw ContractError("tree depth must be in [1, 16], got " + std::to_string(depth));
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::size_t num_control_points(int depth)
{
  check_depth(depth);
  return 4 + (std::size_t{1} << depth);
}

std::size_t num_latent(int depth)
{
  check_depth(depth);
  return 2 * ((std::size_t{1} << depth) - 1);
}

int spline_degree(int depth) { return std::min(kMaxDegree, static_cast<int>(num_control_points(depth)) - 1); }

TreeLayout tree_layout(int depth)
{
  TreeLayout layout;
  layout.depth = depth;
  layout.num_points = num_control_points(depth);
  std::deque<std::pair<std::size_t, std::size_t>> queue{{2, layout.num_points - 2}};
  while (!queue.empty()) {
    const auto [lo, hi] = queue.front();
    queue.pop_front();
    if (hi - lo < 2) {
      continue;
    }
    const std::size_t mid = (lo + hi) / 2;
    layout.nodes.push_back({mid, lo, hi});
    queue.emplace_back(lo, mid);
    queue.emplace_back(mid, hi);
  }
  return layout;
}

void LatentParams::validate() const
{
  if (phi.size() != num_latent(depth)) {
    throw ContractError(
      "latent vector has " + std::to_string(phi.size()) + " entries, depth " + std::to_string(depth) + " needs " +
      std::to_string(num_latent(depth)));
  }
  for (double v : phi) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw ContractError("latent entries must lie in [-1,1]");
    }
  }
}

BoundaryPoints boundary_control_points(
  const Configuration & q0, const Configuration & qd, std::size_t num_points, const KnotVector & knots,
  const BuilderConfig & cfg)
{
  if (num_points != knots.num_points()) {
    throw ContractError("control point count does not match the knot vector");
  }
  if (num_points < 6 || knots.degree() < 2) {
    throw ContractError("boundary construction needs at least 6 control points and degree >= 2");
  }
  const double chord = norm(qd.position() - q0.position());
  if (!(chord > 0.0)) {
    throw DegenerateProblem("start and goal positions coincide");
  }
  const double spacing = chord / static_cast<double>(num_points - 1);
  const double s0 = cfg.start_scale.value_or(spacing);
  const double s1 = cfg.goal_scale.value_or(spacing);
  if (!(s0 > 0.0) || !(s1 > 0.0)) {
    throw ContractError("heading scales must be positive");
  }

  // Curvature at t = 0 of a clamped spline, with p1 - p0 = s0 * t and
  // p2 - p1 = s0 * t + h * n:  kappa = (p - 1) h a^2 / (p b c s0^2).
  const auto p = static_cast<std::size_t>(knots.degree());
  const double a = knots[p + 1] - knots[1];
  const double b = knots[p + 2] - knots[2];
  const double c = knots[p + 1] - knots[2];
  const double pd = static_cast<double>(p);
  const double h = q0.kappa * pd * b * c * s0 * s0 / ((pd - 1.0) * a * a);

  const Vec2 t0 = unit_from_angle(q0.theta);
  const Vec2 td = unit_from_angle(qd.theta);
  BoundaryPoints out;
  out.p0 = q0.position();
  out.p1 = out.p0 + t0 * s0;
  out.p2 = out.p1 + t0 * s0 + perp(t0) * h;
  out.goal = qd.position();
  out.goal_inner = out.goal - td * s1;
  return out;
}

Vec2 place_point(const Vec2 & pj, const Vec2 & pk, double phi_x, double phi_y)
{
  const double d = std::max(std::abs(pj.x - pk.x), std::abs(pj.y - pk.y));
  return (pj + pk) * 0.5 + Vec2{phi_x, phi_y} * (0.5 * d);
}

ControlPolygon build_polygon(
  const Configuration & q0, const Configuration & qd, const LatentParams & phi, const KnotVector & knots,
  const BuilderConfig & cfg)
{
  phi.validate();
  const std::size_t n = num_control_points(phi.depth);
  if (knots.num_points() != n) {
    throw ContractError("knot vector does not match tree depth " + std::to_string(phi.depth));
  }
  const auto bp = boundary_control_points(q0, qd, n, knots, cfg);
  ControlPolygon poly(n);
  poly[0] = bp.p0;
  poly[1] = bp.p1;
  poly[2] = bp.p2;
  poly[n - 2] = bp.goal_inner;
  poly[n - 1] = bp.goal;
  for (const auto & node : tree_layout(phi.depth).nodes) {
    const std::size_t off = latent_offset(node.index);
    poly[node.index] = place_point(poly[node.left], poly[node.right], phi.phi[off], phi.phi[off + 1]);
  }
  return poly;
}

std::vector<double> PolygonJacobian::pullback(std::span<const Vec2> grad_points) const
{
  if (grad_points.size() != num_points_) {
    throw ContractError("pullback: gradient has the wrong number of points");
  }
  std::vector<double> out(num_phi_, 0.0);
  for (std::size_t i = 0; i < num_points_; ++i) {
    const double gx = grad_points[i].x;
    const double gy = grad_points[i].y;
    if (gx == 0.0 && gy == 0.0) {
      continue;
    }
    for (std::size_t c = 0; c < num_phi_; ++c) {
      out[c] += gx * (*this)(2 * i, c) + gy * (*this)(2 * i + 1, c);
    }
  }
  return out;
}

PolygonJacobian polygon_gradient(
  const Configuration & q0, const Configuration & qd, const LatentParams & phi, const KnotVector & knots,
  const BuilderConfig & cfg)
{
  const ControlPolygon poly = build_polygon(q0, qd, phi, knots, cfg);
  const std::size_t n = poly.size();
  const std::size_t m = phi.phi.size();
  PolygonJacobian jac(n, m);
  std::vector<double> dd(m);
  for (const auto & node : tree_layout(phi.depth).nodes) {
    const Vec2 & pj = poly[node.left];
    const Vec2 & pk = poly[node.right];
    const double dx = pj.x - pk.x;
    const double dy = pj.y - pk.y;
    const bool x_branch = std::abs(dx) >= std::abs(dy);
    const double d = x_branch ? std::abs(dx) : std::abs(dy);
    const double sg = x_branch ? sign(dx) : sign(dy);
    const std::size_t jr = 2 * node.left + (x_branch ? 0 : 1);
    const std::size_t kr = 2 * node.right + (x_branch ? 0 : 1);
    for (std::size_t c = 0; c < m; ++c) {
      dd[c] = sg * (jac(jr, c) - jac(kr, c));
    }
    const std::size_t off = latent_offset(node.index);
    const double phx = phi.phi[off];
    const double phy = phi.phi[off + 1];
    for (std::size_t c = 0; c < m; ++c) {
      jac(2 * node.index, c) = 0.5 * (jac(2 * node.left, c) + jac(2 * node.right, c)) + 0.5 * phx * dd[c];
      jac(2 * node.index + 1, c) = 0.5 * (jac(2 * node.left + 1, c) + jac(2 * node.right + 1, c)) + 0.5 * phy * dd[c];
    }
    jac(2 * node.index, off) += 0.5 * d;
    jac(2 * node.index + 1, off + 1) += 0.5 * d;
  }
  return jac;
}

PathModel make_path_model(int depth, std::size_t num_samples)
{
  const int degree = spline_degree(depth);
  const std::size_t n = num_control_points(depth);
  return PathModel{depth, make_knots(degree, n), tree_layout(depth), SplineSampler::cached(degree, n, num_samples)};
}

}  // namespace bsplan
