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

#ifndef BSPLAN__PLANNER_HPP_
#define BSPLAN__PLANNER_HPP_

#include "bsplan/losses.hpp"
#include "bsplan/network.hpp"
#include "bsplan/path_builder.hpp"
#include "bsplan/scenario.hpp"

namespace bsplan
{

struct PlanResult
{
  LatentParams phi;
  ControlPolygon polygon;
  PathSamples samples;
  FeasibilityVerdict verdict;
  LossBreakdown loss;
  int iterations{0};
  double wall_time{0.0};  // seconds
};

struct GradientDescentConfig
{
  int max_iterations{500};
  // Largest per-entry change of phi on the first trial step.
  double initial_step{0.05};
  // While infeasible, a line search that shrinks below this takes a step of
  // this size anyway. The collision flags make the loss jump whenever a
  // sample starts to collide, and a strictly monotone search stalls there.
  double escape_step{1e-2};
  // Once feasible the search may shrink down to this.
  double min_step{1e-9};
  // Stop once feasible and tcurv changed by less than this (relative)
  // over `patience` accepted steps.
  double tcurv_tolerance{1e-4};
  int patience{10};
  LossConfig loss;
  Exec exec{Exec::parallel};
};

/// Per-instance projected gradient descent on phi, starting from phi = 0.
/// Each trial step moves phi by at most `step` per entry along -grad and is
/// accepted when it lowers the loss of the current phase: curv + coll while
/// that is positive, the full loss once it is zero. A step from the first
/// phase into the second is always accepted, and the first phase falls back
/// to an escape step instead of giving up. Returns the best feasible
/// iterate, or the last iterate when none was feasible.
PlanResult plan_gradient_descent(
  const PlanningContext & ctx, const PathModel & model, const GradientDescentConfig & cfg = {});

/// One forward pass, polygon construction, sampling and verdict. Collision
/// flags use CheckMode::fixed_cost; wall_time excludes the reported loss.
PlanResult plan_neural(
  const NetworkModel & network, const PlanningContext & ctx, const PathModel & model, Exec exec = Exec::parallel);

}  // namespace bsplan

#endif  // BSPLAN__PLANNER_HPP_
