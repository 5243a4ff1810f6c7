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

#ifndef BSPLAN__NETWORK_HPP_
#define BSPLAN__NETWORK_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bsplan/path_builder.hpp"
#include "bsplan/scenario.hpp"

namespace bsplan
{

/// Layer sizes of the planner network:
///   grid -> fixed average pool -> conv3x3/2 + ReLU -> conv3x3/2 + ReLU
///        -> flatten ++ configuration features -> dense + ReLU -> dense + tanh
struct NetworkShape
{
  int grid_width{kDefaultGridCells};
  int grid_height{kDefaultGridCells};
  int pool{4};
  int conv1_channels{8};
  int conv2_channels{16};
  int hidden{64};
  int depth{3};

  void validate() const;
  int pooled_width() const { return grid_width / pool; }
  int pooled_height() const { return grid_height / pool; }
  int conv1_width() const { return pooled_width() / 2; }
  int conv1_height() const { return pooled_height() / 2; }
  int conv2_width() const { return conv1_width() / 2; }
  int conv2_height() const { return conv1_height() / 2; }
  int map_features() const { return conv2_channels * conv2_width() * conv2_height(); }
  int outputs() const { return static_cast<int>(num_latent(depth)); }
  friend bool operator==(const NetworkShape &, const NetworkShape &) = default;
};

/// Number of scalars derived from (q0, qd) and fed next to the map features.
inline constexpr int kConfigFeatures = 13;

struct ParamBlock
{
  std::string name;
  std::size_t offset;
  std::size_t size;
};

class NetworkModel
{
public:
  NetworkModel(const NetworkShape & shape, const VehicleParams & vehicle);

  /// He-uniform hidden layers; the output head is scaled by `head_scale`.
  static NetworkModel random(
    const NetworkShape & shape, const VehicleParams & vehicle, std::uint64_t seed, double head_scale = 0.1);

  const NetworkShape & shape() const { return shape_; }
  const VehicleParams & vehicle() const { return vehicle_; }
  int depth() const { return shape_.depth; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const std::vector<ParamBlock> & blocks() const { return blocks_; }
  std::span<double> block(const std::string & name);
  std::span<const double> block(const std::string & name) const;

  friend bool operator==(const NetworkModel &, const NetworkModel &);

private:
  NetworkShape shape_;
  VehicleParams vehicle_;
  std::vector<ParamBlock> blocks_;
  std::vector<double> params_;
};

/// Activations kept for the backward pass.
struct ForwardCache
{
  std::vector<double> pooled;
  std::vector<double> conv1;  // post-ReLU
  std::vector<double> conv2;  // post-ReLU
  std::vector<double> features;
  std::vector<double> hidden;  // post-ReLU
  std::vector<double> output;  // post-tanh
};

std::vector<double> config_features(const Configuration & q0, const Configuration & qd, const OccupancyGrid & grid,
                                    double kappa_max);

/// Throws ContractError when the grid does not match the model input.
LatentParams network_forward(const NetworkModel & model, const Scenario & scenario, ForwardCache * cache = nullptr);

/// dL/d(params) given dL/d(phi) and the cache of the matching forward pass.
std::vector<double> network_backward(
  const NetworkModel & model, const ForwardCache & cache, std::span<const double> grad_phi);

void save_model(std::ostream & out, const NetworkModel & model);
NetworkModel load_model(std::istream & in);
void save_model(const std::filesystem::path & path, const NetworkModel & model);
NetworkModel load_model(const std::filesystem::path & path);

}  // namespace bsplan

#endif  // BSPLAN__NETWORK_HPP_
