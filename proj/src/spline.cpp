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

#include "bsplan/spline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "bsplan/kernels.hpp"

namespace bsplan
{

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots))
{
  if (degree_ < 0) {
    throw ContractError("knot vector degree must be non-negative");
  }
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < 2 * (p + 1)) {
    throw ContractError("knot vector too short for degree " + std::to_string(degree_));
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i] >= 0.0 && knots_[i] <= 1.0)) {
      throw ContractError("knots must lie in [0,1]");
    }
    if (i > 0 && knots_[i] < knots_[i - 1]) {
      throw ContractError("knots must be nondecreasing");
    }
  }
  for (std::size_t i = 0; i <= p; ++i) {
    if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
      throw ContractError("knot vector is not clamped");
    }
  }
}

KnotVector make_knots(int degree, std::size_t num_points)
{
  if (degree < 1) {
    throw ContractError("spline degree must be at least 1");
  }
  const auto p = static_cast<std::size_t>(degree);
  if (num_points < p + 1) {
    throw ContractError(
      "degree " + std::to_string(degree) + " needs at least " + std::to_string(p + 1) + " control points, got " +
      std::to_string(num_points));
  }
  const std::size_t spans = num_points - p;
  std::vector<double> knots;
  knots.reserve(num_points + p + 1);
  knots.insert(knots.end(), p + 1, 0.0);
  for (std::size_t i = 1; i < spans; ++i) {
    knots.push_back(static_cast<double>(i) / static_cast<double>(spans));
  }
  knots.insert(knots.end(), p + 1, 1.0);
  return KnotVector(degree, std::move(knots));
}

namespace
{

std::size_t find_span(double t, const KnotVector & kv)
{
  const std::size_t n = kv.num_points() - 1;
  const auto p = static_cast<std::size_t>(kv.degree());
  if (t >= kv[n + 1]) {
    // t == 1: last non-empty span
    std::size_t k = n;
    while (k > p && kv[k] == kv[k + 1]) {
      --k;
    }
    return k;
  }
  std::size_t low = p;
  std::size_t high = n + 1;
  std::size_t mid = (low + high) / 2;
  while (t < kv[mid] || t >= kv[mid + 1]) {
    if (t < kv[mid]) {
      high = mid;
    } else {
      low = mid;
    }
    mid = (low + high) / 2;
  }
  return mid;
}

// Row-major product a (r x m) * b (m x c).
BasisMatrix multiply(const BasisMatrix & a, const BasisMatrix & b)
{
  BasisMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(r, k);
      if (v == 0.0) {
        continue;
      }
      for (std::size_t c = 0; c < b.cols(); ++c) {
        out(r, c) += v * b(k, c);
      }
    }
  }
  return out;
}

double derivative_coefficient(const KnotVector & kv, std::size_t i)
{
  const auto p = static_cast<std::size_t>(kv.degree());
  const double span = kv[i + p + 1] - kv[i + 1];
  if (span <= 0.0) {
    throw ContractError("zero knot span in derivative control point " + std::to_string(i));
  }
  return static_cast<double>(p) / span;
}

KnotVector drop_end_knots(const KnotVector & kv)
{
  const auto & k = kv.knots();
  return KnotVector(kv.degree() - 1, std::vector<double>(k.begin() + 1, k.end() - 1));
}

// (N-1) x N linear map taking control points to derivative control points.
BasisMatrix derivative_operator(const KnotVector & kv)
{
  const std::size_t n = kv.num_points();
  BasisMatrix op(n - 1, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = derivative_coefficient(kv, i);
    op(i, i) = -c;
    op(i, i + 1) = c;
  }
  return op;
}

}  // namespace

std::vector<double> basis_row(double t, const KnotVector & knots)
{
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("spline parameter outside [0,1]: " + std::to_string(t));
  }
  const auto p = static_cast<std::size_t>(knots.degree());
  const std::size_t span = find_span(t, knots);

  // Nonzero functions N_{span-p..span}, triangular Cox-de Boor scheme.
  std::vector<double> local(p + 1, 0.0);
  std::vector<double> left(p + 1, 0.0);
  std::vector<double> right(p + 1, 0.0);
  local[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = local[r] / (right[r + 1] + left[j - r]);
      local[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    local[j] = saved;
  }

  std::vector<double> row(knots.num_points(), 0.0);
  for (std::size_t j = 0; j <= p; ++j) {
    row[span - p + j] = local[j];
  }
  return row;
}

BasisMatrix basis_matrix(std::span<const double> params, const KnotVector & knots)
{
  BasisMatrix m(params.size(), knots.num_points());
  for (std::size_t s = 0; s < params.size(); ++s) {
    const auto row = basis_row(params[s], knots);
    std::copy(row.begin(), row.end(), &m(s, 0));
  }
  return m;
}

DerivativeSpline derivative_polygon(const ControlPolygon & polygon, const KnotVector & knots)
{
  if (knots.degree() < 1) {
    throw ContractError("cannot differentiate a degree-0 spline");
  }
  if (polygon.size() != knots.num_points()) {
    throw ContractError("control point count does not match the knot vector");
  }
  ControlPolygon out;
  out.reserve(polygon.size() - 1);
  for (std::size_t i = 0; i + 1 < polygon.size(); ++i) {
    out.push_back((polygon[i + 1] - polygon[i]) * derivative_coefficient(knots, i));
  }
  return {std::move(out), drop_end_knots(knots)};
}

Vec2 evaluate(const ControlPolygon & polygon, const KnotVector & knots, double t)
{
  if (polygon.size() != knots.num_points()) {
    throw ContractError("control point count does not match the knot vector");
  }
  const auto row = basis_row(t, knots);
  Vec2 out;
  for (std::size_t j = 0; j < row.size(); ++j) {
    out += polygon[j] * row[j];
  }
  return out;
}

std::vector<double> uniform_params(std::size_t count)
{
  if (count < 2) {
    throw ContractError("need at least two samples");
  }
  std::vector<double> params(count);
  const double denom = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    params[i] = static_cast<double>(i) / denom;
  }
  params.back() = 1.0;
  return params;
}

SplineSampler::SplineSampler(KnotVector knots, std::size_t num_samples)
  : knots_(std::move(knots)), params_(uniform_params(num_samples))
{
  if (knots_.degree() < 2) {
    throw ContractError("sampling curvature needs a spline of degree >= 2");
  }
  const KnotVector k1 = drop_end_knots(knots_);
  const KnotVector k2 = drop_end_knots(k1);
  const BasisMatrix op1 = derivative_operator(knots_);
  const BasisMatrix op2 = multiply(derivative_operator(k1), op1);
  pos_ = basis_matrix(params_, knots_);
  d1_ = multiply(basis_matrix(params_, k1), op1);
  d2_ = multiply(basis_matrix(params_, k2), op2);
}

void fill_curvature(PathSamples & samples, const SampleOptions & opts)
{
  const std::size_t n = samples.first_deriv.size();
  samples.curvature.assign(n, 0.0);
  samples.degenerate.assign(n, 0);
  samples.num_degenerate = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & d1 = samples.first_deriv[i];
    const Vec2 & d2 = samples.second_deriv[i];
    const double speed = norm(d1);
    const double c = cross(d1, d2);
    if (speed < opts.velocity_floor) {
      samples.degenerate[i] = 1;
      ++samples.num_degenerate;
      samples.curvature[i] = c < 0.0 ? -opts.degenerate_curvature : opts.degenerate_curvature;
    } else {
      samples.curvature[i] = c / (speed * speed * speed);
    }
  }
}

PathSamples SplineSampler::sample(const ControlPolygon & polygon, const SampleOptions & opts) const
{
  if (polygon.size() != num_points()) {
    throw ContractError(
      "sampler expects " + std::to_string(num_points()) + " control points, got " + std::to_string(polygon.size()));
  }
  const std::size_t s = num_samples();
  PathSamples out;
  out.positions.resize(s);
  out.first_deriv.resize(s);
  out.second_deriv.resize(s);
  kernels::apply_basis(opts.exec, pos_, polygon, out.positions);
  kernels::apply_basis(opts.exec, d1_, polygon, out.first_deriv);
  kernels::apply_basis(opts.exec, d2_, polygon, out.second_deriv);
  fill_curvature(out, opts);
  out.seg_lengths.assign(s, 0.0);
  for (std::size_t i = 1; i < s; ++i) {
    out.seg_lengths[i] = norm(out.positions[i] - out.positions[i - 1]);
  }
  return out;
}

std::shared_ptr<const SplineSampler> SplineSampler::cached(int degree, std::size_t num_points, std::size_t num_samples)
{
  using Key = std::tuple<int, std::size_t, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const SplineSampler>> cache;
  const Key key{degree, num_points, num_samples};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_shared<SplineSampler>(make_knots(degree, num_points), num_samples)).first;
  }
  return it->second;
}

PathSamples sample_path(
  const ControlPolygon & polygon, const KnotVector & knots, std::size_t num_samples, const SampleOptions & opts)
{
  return SplineSampler(knots, num_samples).sample(polygon, opts);
}

}  // namespace bsplan
