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

#ifndef BSPLAN__PATH_BUILDER_HPP_
#define BSPLAN__PATH_BUILDER_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bsplan/geometry.hpp"
#include "bsplan/spline.hpp"

namespace bsplan
{

inline constexpr int kMaxDegree = 7;

/// 4 + 2^D: five boundary points plus 2^D - 1 tree points.
std::size_t num_control_points(int depth);
/// 2 * (2^D - 1) latent values, one pair per tree point.
std::size_t num_latent(int depth);
/// Degree 7, lowered to N - 1 when the tree is too shallow for a septic spline.
int spline_degree(int depth);

struct TreeNode
{
  std::size_t index;  // control point placed by this node
  std::size_t left;   // parent j
  std::size_t right;  // parent k
  friend bool operator==(const TreeNode &, const TreeNode &) = default;
};

struct TreeLayout
{
  int depth{0};
  std::size_t num_points{0};
  std::vector<TreeNode> nodes;  // breadth-first
};

TreeLayout tree_layout(int depth);

/// Position of the latent pair of control point i inside phi.
constexpr std::size_t latent_offset(std::size_t point_index) { return 2 * (point_index - 3); }

struct LatentParams
{
  int depth{1};
  std::vector<double> phi;

  static LatentParams zeros(int depth) { return {depth, std::vector<double>(num_latent(depth), 0.0)}; }
  /// Throws ContractError on a length mismatch or entries outside [-1,1].
  void validate() const;
};

struct BuilderConfig
{
  // Distances p0->p1 and p_{N-2}->p_{N-1}; default |qd - q0| / (N - 1).
  std::optional<double> start_scale;
  std::optional<double> goal_scale;
};

struct BoundaryPoints
{
  Vec2 p0, p1, p2;
  Vec2 goal_inner;  // p_{N-2}
  Vec2 goal;        // p_{N-1}
};

/// Control points fixed by the start pose (position, heading, curvature) and
/// the goal pose (position, heading). Throws DegenerateProblem when start and
/// goal positions coincide.
BoundaryPoints boundary_control_points(
  const Configuration & q0, const Configuration & qd, std::size_t num_points, const KnotVector & knots,
  const BuilderConfig & cfg = {});

/// Midpoint of p_j, p_k plus the latent pair scaled into the square of side
/// max(|x_j - x_k|, |y_j - y_k|).
Vec2 place_point(const Vec2 & pj, const Vec2 & pk, double phi_x, double phi_y);

ControlPolygon build_polygon(
  const Configuration & q0, const Configuration & qd, const LatentParams & phi, const KnotVector & knots,
  const BuilderConfig & cfg = {});

/// d(control point coordinates) / d(phi). Row 2i is x_i, row 2i+1 is y_i.
class PolygonJacobian
{
public:
  PolygonJacobian(std::size_t num_points, std::size_t num_phi)
    : num_points_(num_points), num_phi_(num_phi), data_(2 * num_points * num_phi, 0.0)
  {
  }

  std::size_t num_points() const { return num_points_; }
  std::size_t num_phi() const { return num_phi_; }
  double & operator()(std::size_t row, std::size_t col) { return data_[row * num_phi_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * num_phi_ + col]; }

  /// J^T g for a gradient g with respect to the control points.
  std::vector<double> pullback(std::span<const Vec2> grad_points) const;

private:
  std::size_t num_points_;
  std::size_t num_phi_;
  std::vector<double> data_;
};

/// Exact chain rule through the tree recursion. The max in the square side
/// uses the |dx| branch on ties, and sign(0) = 0.
PolygonJacobian polygon_gradient(
  const Configuration & q0, const Configuration & qd, const LatentParams & phi, const KnotVector & knots,
  const BuilderConfig & cfg = {});

/// Everything that depends only on the tree depth and the sample count.
struct PathModel
{
  int depth;
  KnotVector knots;
  TreeLayout layout;
  std::shared_ptr<const SplineSampler> sampler;

  std::size_t num_points() const { return layout.num_points; }
  std::size_t num_phi() const { return num_latent(depth); }
};

PathModel make_path_model(int depth, std::size_t num_samples = kDefaultSamples);

}  // namespace bsplan

#endif  // BSPLAN__PATH_BUILDER_HPP_
