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

#ifndef BSPLAN__LOSSES_HPP_
#define BSPLAN__LOSSES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bsplan/path_builder.hpp"
#include "bsplan/scenario.hpp"
#include "bsplan/spline.hpp"
#include "bsplan/world.hpp"

namespace bsplan
{

struct LossConfig
{
  double gamma{0.1};
  // Optional scaling of the first two terms; 1 reproduces the plain sum.
  double curv_weight{1.0};
  double coll_weight{1.0};
};

struct LossBreakdown
{
  double curv{0.0};
  double coll{0.0};
  double tcurv{0.0};
  int sigma_tcurv{0};
  double total{0.0};
  double gamma{0.1};
};

struct FeasibilityVerdict
{
  bool collision_free{false};
  bool curvature_ok{false};
  bool monotone{false};
  bool feasible{false};
  double max_abs_curvature{0.0};
};

/// Sum of curvature excess over kappa_max. `grad`, when non-empty, receives
/// d/d(kappa_i): sign(kappa_i) on strictly violating samples, 0 elsewhere.
double curvature_loss(std::span<const double> kappa, double kappa_max, std::span<double> grad = {});

/// Total variation of the curvature samples, with its subgradient.
double total_curvature_loss(std::span<const double> kappa, std::span<double> grad = {});

/// Tangent heading per sample; cusp samples reuse the previous heading.
std::vector<double> sample_headings(const PathSamples & samples);

/// Distance from a characteristic point to the reference path, or the
/// free-space distance field when no reference path exists.
struct CollisionTarget
{
  const ReferencePath * reference{nullptr};
  const DistanceField * fallback{nullptr};
  // Takes precedence over both when set.
  std::function<double(const Vec2 &, Vec2 *)> custom;

  double distance(const Vec2 & p, Vec2 * gradient = nullptr) const;
};

CollisionTarget collision_target(const PlanningContext & ctx);

struct CollisionGradient
{
  std::vector<Vec2> positions;
  std::vector<Vec2> first_deriv;
};

/// Sum over samples i >= 1 of sigma_i * (sum of the five characteristic-point
/// distances) * l_i. The collision flags are constants for the gradient.
double collision_loss(
  const PathSamples & samples, std::span<const double> headings, std::span<const std::uint8_t> collisions,
  const VehicleParams & vehicle, const CollisionTarget & target, CollisionGradient * grad = nullptr);

double collision_loss(
  const PathSamples & samples, const CollisionChecker & checker, const CollisionTarget & target,
  CollisionGradient * grad = nullptr);

FeasibilityVerdict feasibility(
  const PathSamples & samples, std::span<const std::uint8_t> collisions, double kappa_max);
FeasibilityVerdict feasibility(const PathSamples & samples, const CollisionChecker & checker);

struct PathEvaluation
{
  PathSamples samples;
  std::vector<double> headings;
  std::vector<std::uint8_t> collisions;
  LossBreakdown loss;
  FeasibilityVerdict verdict;
};

/// Samples, collision flags and verdict only; the loss is left at zero.
PathEvaluation check_path(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx,
  Exec exec = Exec::parallel, CheckMode mode = CheckMode::pruned);

/// Fills ev.loss from the samples and flags of check_path.
void add_loss(
  PathEvaluation & ev, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points = nullptr, Exec exec = Exec::parallel);

/// Samples the polygon and assembles curv + coll + sigma * gamma * tcurv.
/// When `grad_points` is given it receives dL/d(control points).
PathEvaluation evaluate_path(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points = nullptr, Exec exec = Exec::parallel);

LossBreakdown total_loss(
  const ControlPolygon & polygon, const SplineSampler & sampler, const PlanningContext & ctx, const LossConfig & cfg,
  std::vector<Vec2> * grad_points = nullptr);

struct LatentEvaluation
{
  ControlPolygon polygon;
  PathEvaluation path;
  std::vector<double> grad_phi;  // empty unless requested
};

LatentEvaluation evaluate_latent(
  const PathModel & model, const PlanningContext & ctx, const LatentParams & phi, const LossConfig & cfg,
  bool with_gradient, Exec exec = Exec::parallel, const BuilderConfig & builder = {});

}  // namespace bsplan

#endif  // BSPLAN__LOSSES_HPP_
