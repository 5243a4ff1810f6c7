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

#include "bsplan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsplan/kernels.hpp"

namespace bsplan
{

namespace
{

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double curvature_loss(std::span<const double> kappa, double kappa_max, std::span<double> grad)
{
  if (!(kappa_max > 0.0)) {
    throw ContractError("kappa_max must be positive");
  }
  if (!grad.empty() && grad.size() != kappa.size()) {
    throw ContractError("curvature_loss: gradient size mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double excess = std::abs(kappa[i]) - kappa_max;
    if (excess > 0.0) {
      loss += excess;
    }
    if (!grad.empty()) {
      grad[i] = excess > 0.0 ? sign(kappa[i]) : 0.0;
    }
  }
  return loss;
}

double total_curvature_loss(std::span<const double> kappa, std::span<double> grad)
{
  if (!grad.empty() && grad.size() != kappa.size()) {
    throw ContractError("total_curvature_loss: gradient size mismatch");
  }
  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  double loss = 0.0;
  for (std::size_t i = 1; i < kappa.size(); ++i) {
    const double diff = kappa[i] - kappa[i - 1];
    loss += std::abs(diff);
    if (!grad.empty()) {
      grad[i] += sign(diff);
      grad[i - 1] -= sign(diff);
    }
  }
  return loss;
}

std::vector<double> sample_headings(const PathSamples & samples)
{
  const std::size_t n = samples.size();
  std::vector<double> headings(n, 0.0);
  std::size_t first = 0;
  while (first < n && samples.degenerate[first]) {
    ++first;
  }
  const double initial = first < n ? std::atan2(samples.first_deriv[first].y, samples.first_deriv[first].x) : 0.0;
  double prev = initial;
  for (std::size_t i = 0; i < n; ++i) {
    if (!samples.degenerate[i]) {
      prev = std::atan2(samples.first_deriv[i].y, samples.first_deriv[i].x);
    }
    headings[i] = prev;
  }
  return headings;
}

double CollisionTarget::distance(const Vec2 & p, Vec2 * gradient) const
{
  if (custom) {
    return custom(p, gradient);
  }
  if (reference != nullptr && !reference->polyline.empty()) {
    return distance_to_polyline(p, *reference, gradient);
  }
  if (fallback != nullptr) {
    return fallback->interpolate(p, gradient);
  }
  throw ContractError("collision target has neither a reference path nor a fallback field");
}

CollisionTarget collision_target(const PlanningContext & ctx)
{
  return CollisionTarget{ctx.reference ? &*ctx.reference : nullptr, ctx.free_distance.get(), {}};
}

double collision_loss(
  const PathSamples & samples, std::span<const double> headings, std::span<const std::uint8_t> collisions,
  const VehicleParams & vehicle, const CollisionTarget & target, CollisionGradient * grad)
{
  const std::size_t n = samples.size();
  if (headings.size() != n || collisions.size() != n) {
    throw ContractError("collision_loss: per-sample arrays have mismatched sizes");
  }
  if (grad != nullptr) {
    grad->positions.assign(n, Vec2{});
    grad->first_deriv.assign(n, Vec2{});
  }
  const auto local = footprint_local_points(vehicle);
  double loss = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!collisions[i]) {
      continue;
    }
    const double c = std::cos(headings[i]);
    const double s = std::sin(headings[i]);
    const Vec2 pos = samples.positions[i];
    double dist_sum = 0.0;
    Vec2 grad_pos;
    double grad_heading = 0.0;
    for (const Vec2 & lp : local) {
      const Vec2 rotated{c * lp.x - s * lp.y, s * lp.x + c * lp.y};
      Vec2 g;
      dist_sum += target.distance(pos + rotated, &g);
      grad_pos += g;
      grad_heading += dot(g, perp(rotated));
    }
    const Vec2 step = pos - samples.positions[i - 1];
    const double li = samples.seg_lengths[i];
    loss += dist_sum * li;
    if (grad == nullptr) {
      continue;
    }
    grad->positions[i] += grad_pos * li;
    if (li > 0.0) {
      const Vec2 u = step / li;
      grad->positions[i] += u * dist_sum;
      grad->positions[i - 1] -= u * dist_sum;
    }
    if (!samples.degenerate[i]) {
      const Vec2 d1 = samples.first_deriv[i];
      const double v2 = dot(d1, d1);
      grad->first_deriv[i] += Vec2{-d1.y, d1.x} * (grad_heading * li / v2);
    }
  }
  return loss;
}

double collision_loss(
  const PathSamples & samples, const CollisionChecker & checker, const CollisionTarget & target,
  CollisionGradient * grad)
{
  const auto headings = sample_headings(samples);
  std::vector<std::uint8_t> flags(samples.size());
  kernels::collision_flags(Exec::parallel, checker, samples.positions, headings, flags);
  return collision_loss(samples, headings, flags, checker.vehicle(), target, grad);
}

FeasibilityVerdict feasibility(const PathSamples & samples, std::span<const std::uint8_t> collisions, double kappa_max)
{
  FeasibilityVerdict v;
  v.collision_free = std::none_of(collisions.begin(), collisions.end(), [](std::uint8_t f) { return f != 0; });
  for (double k : samples.curvature) {
    v.max_abs_curvature = std::max(v.max_abs_curvature, std::abs(k));
  }
  v.curvature_ok = v.max_abs_curvature <= kappa_max + 1e-9;
  double turning = 0.0;
  const auto headings = sample_headings(samples);
  for (std::size_t i = 1; i < headings.size(); ++i) {
    turning += std::abs(wrap_angle(headings[i] - headings[i - 1]));
  }
  v.monotone = samples.num_degenerate == 0 && turning < 2.0 * std::numbers::pi;
  v.feasible = v.collision_free && v.curvature_ok && v.monotone;
  return v;
}

FeasibilityVerdict feasibility(const PathSamples & samples, const CollisionChecker & checker)
{
  const auto headings = sample_headings(samples);
  std::vector<std::uint8_t> flags(samples.size());
  kernels::collision_flags(Exec::parallel, checker, samples.positions, headings, flags);
  return feasibility(samples, flags, checker.vehicle().kappa_max);
}

PathEvaluation check_path(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx, Exec exec,
  CheckMode mode)
{
  SampleOptions opts;
  opts.degenerate_curvature = 10.0 * ctx.vehicle.kappa_max;
  opts.exec = exec;

  PathEvaluation ev;
  ev.samples = sampler.sample(polygon, opts);
  ev.headings = sample_headings(ev.samples);
  ev.collisions.assign(ev.samples.size(), 0);
  kernels::collision_flags(exec, *ctx.checker, ev.samples.positions, ev.headings, ev.collisions, mode);
  ev.verdict = feasibility(ev.samples, ev.collisions, ctx.vehicle.kappa_max);
  return ev;
}

void add_loss(
  PathEvaluation & ev, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points, Exec exec)
{
  const double kappa_max = ctx.vehicle.kappa_max;
  const std::size_t n = ev.samples.size();
  const bool want_grad = grad_points != nullptr;
  std::vector<double> g_curv(want_grad ? n : 0);
  std::vector<double> g_tcurv(want_grad ? n : 0);
  CollisionGradient g_coll;
  const CollisionTarget target = collision_target(ctx);

  LossBreakdown & loss = ev.loss;
  loss.gamma = cfg.gamma;
  loss.curv = curvature_loss(ev.samples.curvature, kappa_max, g_curv);
  loss.tcurv = total_curvature_loss(ev.samples.curvature, g_tcurv);
  loss.coll =
    collision_loss(ev.samples, ev.headings, ev.collisions, ctx.vehicle, target, want_grad ? &g_coll : nullptr);
  loss.sigma_tcurv = (loss.curv == 0.0 && loss.coll == 0.0) ? 1 : 0;
  loss.total = cfg.curv_weight * loss.curv + cfg.coll_weight * loss.coll + loss.sigma_tcurv * cfg.gamma * loss.tcurv;

  if (!want_grad) {
    return;
  }

  // dL/d(samples), then through the three basis matrices.
  std::vector<Vec2> g_pos(n);
  std::vector<Vec2> g_d1(n);
  std::vector<Vec2> g_d2(n);
  const double tcurv_scale = loss.sigma_tcurv * cfg.gamma;
  for (std::size_t i = 0; i < n; ++i) {
    g_pos[i] = g_coll.positions[i] * cfg.coll_weight;
    g_d1[i] = g_coll.first_deriv[i] * cfg.coll_weight;
    if (ev.samples.degenerate[i]) {
      continue;
    }
    const double gk = cfg.curv_weight * g_curv[i] + tcurv_scale * g_tcurv[i];
    if (gk == 0.0) {
      continue;
    }
    const Vec2 d1 = ev.samples.first_deriv[i];
    const Vec2 d2 = ev.samples.second_deriv[i];
    const double v2 = dot(d1, d1);
    const double v = std::sqrt(v2);
    const double v3 = v2 * v;
    const double c = cross(d1, d2);
    const double k3 = 3.0 * c / (v3 * v2);
    g_d1[i] += Vec2{d2.y / v3 - k3 * d1.x, -d2.x / v3 - k3 * d1.y} * gk;
    g_d2[i] += Vec2{-d1.y / v3, d1.x / v3} * gk;
  }
  grad_points->assign(sampler.num_points(), Vec2{});
  kernels::accumulate_basis_transpose(exec, sampler.position_basis(), g_pos, *grad_points);
  kernels::accumulate_basis_transpose(exec, sampler.first_basis(), g_d1, *grad_points);
  kernels::accumulate_basis_transpose(exec, sampler.second_basis(), g_d2, *grad_points);
}

PathEvaluation evaluate_path(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points, Exec exec)
{
  PathEvaluation ev = check_path(polygon, sampler, ctx, exec);
  add_loss(ev, sampler, ctx, cfg, grad_points, exec);
  return ev;
}

LossBreakdown total_loss(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points)
{
  return evaluate_path(polygon, sampler, ctx, cfg, grad_points).loss;
}

LatentEvaluation evaluate_latent(
  const PathModel & model, const PlanningContext & ctx, const LatentParams & phi, const LossConfig & cfg,
  bool with_gradient, Exec exec, const BuilderConfig & builder)
{
  if (phi.depth != model.depth) {
    throw ContractError("latent depth does not match the path model");
  }
  const auto & q0 = ctx.scenario.q0;
  const auto & qd = ctx.scenario.qd;
  LatentEvaluation out;
  out.polygon = build_polygon(q0, qd, phi, model.knots, builder);
  std::vector<Vec2> grad_points;
  out.path = evaluate_path(out.polygon, *model.sampler, ctx, cfg, with_gradient ? &grad_points : nullptr, exec);
  if (with_gradient) {
    out.grad_phi = polygon_gradient(q0, qd, phi, model.knots, builder).pullback(grad_points);
  }
  return out;
}

}  // namespace bsplan
