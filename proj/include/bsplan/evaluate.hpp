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

#ifndef BSPLAN__EVALUATE_HPP_
#define BSPLAN__EVALUATE_HPP_

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsplan/planner.hpp"
#include "bsplan/scenario.hpp"
#include "bsplan/train.hpp"

namespace bsplan
{

enum class PlannerKind { gradient_descent, neural };

PlannerKind parse_planner(const std::string & name);
std::string planner_name(PlannerKind kind);

/// Feasibility recomputed from the control polygon alone: point-wise de Boor
/// evaluation of the curve and its two derivative curves, and plain
/// footprint edge sampling against the grid. Shares no code path with the
/// planners' cached sampler, collision checker or verdict.
FeasibilityVerdict verify_independent(
  const ControlPolygon & polygon, const KnotVector & knots, std::size_t num_samples, const OccupancyGrid & grid,
  const VehicleParams & vehicle);

struct VerificationFailure : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct EvaluateOptions
{
  PlannerKind planner{PlannerKind::gradient_descent};
  int depth{3};
  const NetworkModel * model{nullptr};  // required for the neural planner
  GradientDescentConfig gd;
  int timing_repeats{3};  // median of this many runs per scenario
  bool parallel{true};
  std::size_t num_samples{kDefaultSamples};
};

struct ScenarioRow
{
  std::string id;
  std::string kind;
  FeasibilityVerdict verdict;
  double path_length{0.0};
  int iterations{0};
  double time_ms{0.0};
};

struct MetricsReport
{
  std::string planner;
  int depth{0};
  std::size_t total{0};
  std::size_t feasible{0};
  double accuracy{0.0};  // percent
  double mean_time_ms{0.0};
  double std_time_ms{0.0};
  double mean_max_kappa{0.0};  // over feasible plans
  std::vector<ScenarioRow> rows;
};

/// Aggregates are pure functions of the rows.
MetricsReport summarize(std::string planner, int depth, std::vector<ScenarioRow> rows);

/// Plans every scenario (in parallel, collected in suite order) and checks
/// each claimed-feasible plan with verify_independent. A disagreement throws
/// VerificationFailure.
MetricsReport evaluate(
  std::span<const PlanningContext> suite, const EvaluateOptions & opts, std::vector<PlanResult> * results = nullptr);

std::vector<PlanningContext> prepare_suite(const ScenarioSuite & suite, const VehicleParams & vehicle);

/// Comment line with the aggregates, a header, then one row per scenario.
void write_report_csv(std::ostream & out, const MetricsReport & report, bool include_timing = true);
std::string format_report_table(const MetricsReport & report);

struct AblationOptions
{
  std::vector<int> depths{1, 2, 3, 4};
  PlannerKind planner{PlannerKind::neural};
  TrainConfig train;  // depth is overridden per row; epochs = 0 keeps the random init
  EvaluateOptions evaluate;
  std::uint64_t model_seed{1};
};

struct AblationRow
{
  int depth{0};
  MetricsReport report;
};

std::vector<AblationRow> ablate_depth(std::span<const PlanningContext> suite, const AblationOptions & opts);
void write_ablation_csv(std::ostream & out, const std::vector<AblationRow> & rows, bool include_timing = true);
std::string format_ablation_table(const std::vector<AblationRow> & rows);

}  // namespace bsplan

#endif  // BSPLAN__EVALUATE_HPP_
