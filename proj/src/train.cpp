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

#include "bsplan/train.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace bsplan
{

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed)
{
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

SetMetrics evaluate_network(
  const NetworkModel & model, std::span<const PlanningContext> set, const LossConfig & loss, bool parallel)
{
  if (set.empty()) {
    return {};
  }
  const PathModel path_model = make_path_model(model.depth());
  const auto n = static_cast<std::ptrdiff_t>(set.size());
  std::vector<double> losses(set.size());
  std::vector<int> feasible(set.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const LatentParams phi = network_forward(model, set[k].scenario);
    const auto ev = evaluate_latent(path_model, set[k], phi, loss, false, Exec::serial);
    losses[k] = ev.path.loss.total;
    feasible[k] = ev.path.verdict.feasible ? 1 : 0;
  }
  SetMetrics m;
  for (std::size_t k = 0; k < set.size(); ++k) {
    m.mean_loss += losses[k];
    m.accuracy += feasible[k];
  }
  m.mean_loss /= static_cast<double>(set.size());
  m.accuracy = 100.0 * m.accuracy / static_cast<double>(set.size());
  return m;
}

namespace
{

struct Adam
{
  double lr;
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
  long step{0};
  std::vector<double> m;
  std::vector<double> v;

  Adam(double learning_rate, std::size_t n) : lr(learning_rate), m(n, 0.0), v(n, 0.0) {}

  void update(std::span<double> params, std::span<const double> grad)
  {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

}  // namespace

TrainResult train(
  NetworkModel model, std::span<const PlanningContext> train_set, std::span<const PlanningContext> val_set,
  const TrainConfig & cfg, const std::function<void(const EpochMetrics &)> & on_epoch)
{
  if (train_set.empty()) {
    throw ContractError("training set is empty");
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) || !(cfg.gamma >= 0.0)) {
    throw ContractError("invalid training configuration");
  }
  if (model.depth() != cfg.depth) {
    throw ContractError("model depth does not match the training configuration");
  }
  const LossConfig loss_cfg{cfg.gamma, 1.0, 1.0};
  const PathModel path_model = make_path_model(model.depth());
  const std::size_t nparams = model.params().size();
  Adam adam(cfg.learning_rate, nparams);

  TrainResult result{model, {}};
  auto record = [&](int epoch) {
    const SetMetrics tr = evaluate_network(result.model, train_set, loss_cfg, cfg.parallel);
    const SetMetrics va = evaluate_network(result.model, val_set, loss_cfg, cfg.parallel);
    EpochMetrics em{epoch, tr.mean_loss, tr.accuracy, va.mean_loss, va.accuracy};
    if (!std::isfinite(tr.mean_loss) || (!val_set.empty() && !std::isfinite(va.mean_loss))) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) + ": mean loss is not finite");
    }
    result.history.push_back(em);
    if (on_epoch) {
      on_epoch(em);
    }
  };
  record(0);

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::vector<double>> per_sample(std::min(batch, train_set.size()), std::vector<double>(nparams));
  std::vector<double> per_loss(per_sample.size());
  std::vector<double> grad(nparams);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = seeded_permutation(train_set.size(), cfg.seed * 1000003ULL + static_cast<std::uint64_t>(epoch));
    for (std::size_t first = 0; first < order.size(); first += batch) {
      const std::size_t count = std::min(batch, order.size() - first);
      const NetworkModel & current = result.model;
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
      for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(count); ++b) {
        const auto k = static_cast<std::size_t>(b);
        const PlanningContext & ctx = train_set[order[first + k]];
        ForwardCache cache;
        const LatentParams phi = network_forward(current, ctx.scenario, &cache);
        const auto ev = evaluate_latent(path_model, ctx, phi, loss_cfg, true, Exec::serial);
        per_loss[k] = ev.path.loss.total;
        per_sample[k] = network_backward(current, cache, ev.grad_phi);
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = 0; k < count; ++k) {
        if (!std::isfinite(per_loss[k])) {
          throw TrainingDiverged(
            "training diverged at epoch " + std::to_string(epoch) + ": non-finite loss on scenario '" +
            train_set[order[first + k]].scenario.id + "'");
        }
        for (std::size_t i = 0; i < nparams; ++i) {
          grad[i] += per_sample[k][i];
        }
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (double & g : grad) {
        g *= inv;
        if (!std::isfinite(g)) {
          throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) + ": non-finite gradient");
        }
      }
      adam.update(result.model.params(), grad);
    }
    record(epoch);
  }
  return result;
}

TrainResult train(
  NetworkModel model, std::span<const PlanningContext> dataset, const TrainConfig & cfg,
  const std::function<void(const EpochMetrics &)> & on_epoch)
{
  if (dataset.empty()) {
    throw ContractError("dataset is empty");
  }
  const auto order = seeded_permutation(dataset.size(), cfg.seed);
  auto n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(dataset.size())));
  n_val = std::min(n_val, dataset.size() - 1);
  std::vector<PlanningContext> val;
  std::vector<PlanningContext> tr;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_val ? val : tr).push_back(dataset[order[i]]);
  }
  return train(std::move(model), tr, val, cfg, on_epoch);
}

}  // namespace bsplan
