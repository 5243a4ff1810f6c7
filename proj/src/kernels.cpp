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

#include "bsplan/kernels.hpp"

#include <limits>
#include <vector>

namespace bsplan::kernels
{

namespace
{

inline Vec2 basis_row_times(const BasisMatrix & basis, std::size_t s, std::span<const Vec2> points)
{
  const auto row = basis.row(s);
  double x = 0.0;
  double y = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    x += row[j] * points[j].x;
    y += row[j] * points[j].y;
  }
  return Vec2{x, y};
}

inline Vec2 basis_column_times(const BasisMatrix & basis, std::size_t j, std::span<const Vec2> grad)
{
  double x = 0.0;
  double y = 0.0;
  for (std::size_t s = 0; s < basis.rows(); ++s) {
    const double b = basis(s, j);
    x += b * grad[s].x;
    y += b * grad[s].y;
  }
  return Vec2{x, y};
}

void check_transpose(const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out)
{
  if (grad.size() != basis.rows() || out.size() != basis.cols()) {
    throw ContractError("accumulate_basis_transpose: shape mismatch");
  }
}

void check_basis(const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out)
{
  if (points.size() != basis.cols() || out.size() != basis.rows()) {
    throw ContractError("apply_basis: shape mismatch");
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb-Huttenlocher) over one line.
// f: input squared distances, d: output; v, z: scratch of size n and n+1.
// f is contiguous, d is written with `stride`
void edt_1d(const double * f, double * d, std::size_t n, std::size_t stride, int * v, double * z)
{
  int k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    const double fq = f[q];
    if (fq == kInf) {
      continue;
    }
    const auto qi = static_cast<int>(q);
    if (k < 0) {
      k = 0;
      v[0] = qi;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int vk) {
      return ((fq + static_cast<double>(qi) * qi) -
              (f[static_cast<std::size_t>(vk)] + static_cast<double>(vk) * vk)) /
             (2.0 * (qi - vk));
    };
    // z[0] = -inf bounds the pop loop
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = qi;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (std::size_t q = 0; q < n; ++q) {
      d[q * stride] = kInf;
    }
    return;
  }
  int j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double qd = static_cast<double>(q);
    while (z[j + 1] < qd) {
      ++j;
    }
    const double dq = qd - v[j];
    d[q * stride] = dq * dq + f[static_cast<std::size_t>(v[j])];
  }
}

void edt_columns(std::span<const std::uint8_t> sources, int width, int height, std::vector<double> & tmp, int x)
{
  std::vector<double> f(static_cast<std::size_t>(height));
  std::vector<int> v(static_cast<std::size_t>(height));
  std::vector<double> z(static_cast<std::size_t>(height) + 1);
  for (int y = 0; y < height; ++y) {
    f[static_cast<std::size_t>(y)] = sources[static_cast<std::size_t>(y) * width + x] ? 0.0 : kInf;
  }
  edt_1d(f.data(), tmp.data() + x, static_cast<std::size_t>(height), static_cast<std::size_t>(width), v.data(), z.data());
}

void edt_row(const std::vector<double> & tmp, int width, std::span<double> out, int y)
{
  std::vector<int> v(static_cast<std::size_t>(width));
  std::vector<double> z(static_cast<std::size_t>(width) + 1);
  const std::size_t off = static_cast<std::size_t>(y) * width;
  edt_1d(tmp.data() + off, out.data() + off, static_cast<std::size_t>(width), 1, v.data(), z.data());
}

void check_edt(std::span<const std::uint8_t> sources, int width, int height, std::span<double> out)
{
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width <= 0 || height <= 0 || sources.size() != n || out.size() != n) {
    throw ContractError("squared_edt: shape mismatch");
  }
}

}  // namespace

namespace serial
{

void apply_basis(const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out)
{
  check_basis(basis, points, out);
  for (std::size_t s = 0; s < basis.rows(); ++s) {
    out[s] = basis_row_times(basis, s, points);
  }
}

void accumulate_basis_transpose(const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out)
{
  check_transpose(basis, grad, out);
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    out[j] += basis_column_times(basis, j, grad);
  }
}

void collision_flags(
  const CollisionChecker & checker, std::span<const Vec2> positions, std::span<const double> headings,
  std::span<std::uint8_t> flags, CheckMode mode)
{
  for (std::size_t i = 0; i < positions.size(); ++i) {
    flags[i] = checker.collides(positions[i], headings[i], mode) ? 1 : 0;
  }
}

void squared_edt(std::span<const std::uint8_t> sources, int width, int height, std::span<double> out)
{
  check_edt(sources, width, height, out);
  std::vector<double> tmp(out.size());
  for (int x = 0; x < width; ++x) {
    edt_columns(sources, width, height, tmp, x);
  }
  for (int y = 0; y < height; ++y) {
    edt_row(tmp, width, out, y);
  }
}

}  // namespace serial

namespace omp
{

void apply_basis(const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out)
{
  check_basis(basis, points, out);
  const auto rows = static_cast<std::ptrdiff_t>(basis.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < rows; ++s) {
    out[static_cast<std::size_t>(s)] = basis_row_times(basis, static_cast<std::size_t>(s), points);
  }
}

void accumulate_basis_transpose(const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out)
{
  check_transpose(basis, grad, out);
  const auto cols = static_cast<std::ptrdiff_t>(basis.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < cols; ++j) {
    out[static_cast<std::size_t>(j)] += basis_column_times(basis, static_cast<std::size_t>(j), grad);
  }
}

void collision_flags(
  const CollisionChecker & checker, std::span<const Vec2> positions, std::span<const double> headings,
  std::span<std::uint8_t> flags, CheckMode mode)
{
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    flags[k] = checker.collides(positions[k], headings[k], mode) ? 1 : 0;
  }
}

void squared_edt(std::span<const std::uint8_t> sources, int width, int height, std::span<double> out)
{
  check_edt(sources, width, height, out);
  std::vector<double> tmp(out.size());
#pragma omp parallel for schedule(static)
  for (int x = 0; x < width; ++x) {
    edt_columns(sources, width, height, tmp, x);
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    edt_row(tmp, width, out, y);
  }
}

}  // namespace omp

}  // namespace bsplan::kernels
