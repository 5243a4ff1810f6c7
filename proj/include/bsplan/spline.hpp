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

#ifndef BSPLAN__SPLINE_HPP_
#define BSPLAN__SPLINE_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bsplan/geometry.hpp"

namespace bsplan
{

enum class Exec { serial, parallel };

/// Clamped knot vector of a planar B-spline. Construction validates that the
/// knots are nondecreasing, lie in [0,1] and repeat degree+1 times at both ends.
class KnotVector
{
public:
  KnotVector(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  const std::vector<double> & knots() const { return knots_; }
  std::size_t num_points() const { return knots_.size() - static_cast<std::size_t>(degree_) - 1; }
  double operator[](std::size_t i) const { return knots_[i]; }

  friend bool operator==(const KnotVector &, const KnotVector &) = default;

private:
  int degree_;
  std::vector<double> knots_;
};

using ControlPolygon = std::vector<Vec2>;

/// Clamped knot vector with uniformly spaced interior knots.
KnotVector make_knots(int degree, std::size_t num_points);

/// Dense row-major S x N matrix of basis function values.
class BasisMatrix
{
public:
  BasisMatrix() = default;
  BasisMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double & operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> data_;
};

/// Values of all N basis functions at t (Cox-de Boor). Throws DomainError
/// when t lies outside [0,1].
std::vector<double> basis_row(double t, const KnotVector & knots);

BasisMatrix basis_matrix(std::span<const double> params, const KnotVector & knots);

struct DerivativeSpline
{
  ControlPolygon points;
  KnotVector knots;
};

/// Control points and knots of the derivative curve C'(t).
DerivativeSpline derivative_polygon(const ControlPolygon & polygon, const KnotVector & knots);

/// Direct point evaluation through the basis functions at a single parameter.
Vec2 evaluate(const ControlPolygon & polygon, const KnotVector & knots, double t);

/// S equally spaced parameters covering [0,1], endpoints included.
std::vector<double> uniform_params(std::size_t count);

inline constexpr std::size_t kDefaultSamples = 1024;

struct SampleOptions
{
  double velocity_floor{1e-6};
  // Curvature reported at cusps (|C'| below the floor); sign follows C' x C''.
  double degenerate_curvature{10.0 * 0.227};
  Exec exec{Exec::parallel};
};

struct PathSamples
{
  std::vector<Vec2> positions;
  std::vector<Vec2> first_deriv;
  std::vector<Vec2> second_deriv;
  std::vector<double> curvature;
  std::vector<double> seg_lengths;  // l_0 = 0
  std::vector<std::uint8_t> degenerate;
  std::size_t num_degenerate{0};

  std::size_t size() const { return positions.size(); }
};

/// Precomputed position / first / second derivative basis matrices for one
/// (knot vector, sample count) pair. Every derivative matrix is expressed in
/// terms of the original control points, so each sampled quantity is a
/// single matrix-vector product.
class SplineSampler
{
public:
  SplineSampler(KnotVector knots, std::size_t num_samples);

  const KnotVector & knots() const { return knots_; }
  std::size_t num_samples() const { return params_.size(); }
  std::size_t num_points() const { return knots_.num_points(); }
  const std::vector<double> & params() const { return params_; }

  const BasisMatrix & position_basis() const { return pos_; }
  const BasisMatrix & first_basis() const { return d1_; }
  const BasisMatrix & second_basis() const { return d2_; }

  PathSamples sample(const ControlPolygon & polygon, const SampleOptions & opts = {}) const;

  /// Shared instance for clamped-uniform knots; built once per key.
  static std::shared_ptr<const SplineSampler> cached(int degree, std::size_t num_points, std::size_t num_samples);

private:
  KnotVector knots_;
  std::vector<double> params_;
  BasisMatrix pos_;
  BasisMatrix d1_;
  BasisMatrix d2_;
};

PathSamples sample_path(
  const ControlPolygon & polygon, const KnotVector & knots, std::size_t num_samples,
  const SampleOptions & opts = {});

/// Curvature and cusp flags from derivative samples; shared by the sampler
/// and by anything that recomputes samples through another route.
void fill_curvature(PathSamples & samples, const SampleOptions & opts);

}  // namespace bsplan

#endif  // BSPLAN__SPLINE_HPP_
