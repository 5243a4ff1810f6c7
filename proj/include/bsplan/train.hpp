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

#ifndef BSPLAN__TRAIN_HPP_
#define BSPLAN__TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsplan/losses.hpp"
#include "bsplan/network.hpp"
#include "bsplan/scenario.hpp"

namespace bsplan
{

struct TrainConfig
{
  int epochs{400};
  double learning_rate{5e-4};
  int batch_size{128};
  int depth{3};
  double gamma{0.1};
  std::uint64_t seed{0};
  double val_fraction{0.2};
  bool parallel{true};
};

struct EpochMetrics
{
  int epoch{0};  // 0 = before any update
  double train_loss{0.0};
  double train_accuracy{0.0};  // percent
  double val_loss{0.0};
  double val_accuracy{0.0};
};

struct TrainResult
{
  NetworkModel model;
  std::vector<EpochMetrics> history;
};

struct TrainingDiverged : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Mean loss and feasible percentage of the network's plans over a set.
struct SetMetrics
{
  double mean_loss{0.0};
  double accuracy{0.0};
};
SetMetrics evaluate_network(
  const NetworkModel & model, std::span<const PlanningContext> set, const LossConfig & loss, bool parallel = true);

/// Adam on the mean loss over mini-batches; per-scenario gradients are
/// reduced in index order so runs are reproducible for a fixed seed.
TrainResult train(
  NetworkModel model, std::span<const PlanningContext> train_set, std::span<const PlanningContext> val_set,
  const TrainConfig & cfg, const std::function<void(const EpochMetrics &)> & on_epoch = {});

/// Deterministic shuffle-and-split of a dataset by cfg.val_fraction.
TrainResult train(
  NetworkModel model, std::span<const PlanningContext> dataset, const TrainConfig & cfg,
  const std::function<void(const EpochMetrics &)> & on_epoch = {});

/// Fisher-Yates on 0..n-1 driven by a seeded 64-bit Mersenne twister.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace bsplan

#endif  // BSPLAN__TRAIN_HPP_
