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

#ifndef BSPLAN__KERNELS_HPP_
#define BSPLAN__KERNELS_HPP_

// Data-parallel inner loops. Each kernel has a serial reference version and
// an OpenMP version with identical per-element arithmetic, so results match
// bit for bit.

#include <cstdint>
#include <span>

#include "bsplan/geometry.hpp"
#include "bsplan/spline.hpp"
#include "bsplan/world.hpp"

namespace bsplan::kernels
{

namespace serial
{

/// out[s] = sum_j basis(s, j) * points[j]
void apply_basis(const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out);

/// out[j] += sum_s basis(s, j) * grad[s]
void accumulate_basis_transpose(const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out);

void collision_flags(
  const CollisionChecker & checker, std::span<const Vec2> positions, std::span<const double> headings,
  std::span<std::uint8_t> flags, CheckMode mode = CheckMode::pruned);

/// Squared Euclidean distance (in cells^2) from each cell to the nearest
/// source cell; +inf when there are no sources.
void squared_edt(std::span<const std::uint8_t> sources, int width, int height, std::span<double> out);

}  // namespace serial

namespace omp
{

void apply_basis(const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out);
void accumulate_basis_transpose(const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out);
void collision_flags(
  const CollisionChecker & checker, std::span<const Vec2> positions, std::span<const double> headings,
  std::span<std::uint8_t> flags, CheckMode mode = CheckMode::pruned);
void squared_edt(std::span<const std::uint8_t> sources, int width, int height, std::span<double> out);

}  // namespace omp

inline void apply_basis(Exec exec, const BasisMatrix & basis, std::span<const Vec2> points, std::span<Vec2> out)
{
  exec == Exec::serial ? serial::apply_basis(basis, points, out) : omp::apply_basis(basis, points, out);
}

inline void accumulate_basis_transpose(
  Exec exec, const BasisMatrix & basis, std::span<const Vec2> grad, std::span<Vec2> out)
{
  exec == Exec::serial ? serial::accumulate_basis_transpose(basis, grad, out)
                       : omp::accumulate_basis_transpose(basis, grad, out);
}

inline void collision_flags(
  Exec exec, const CollisionChecker & checker, std::span<const Vec2> positions,
  std::span<const double> headings, std::span<std::uint8_t> flags, CheckMode mode = CheckMode::pruned)
{
  exec == Exec::serial ? serial::collision_flags(checker, positions, headings, flags, mode)
                       : omp::collision_flags(checker, positions, headings, flags, mode);
}

inline void squared_edt(
  Exec exec, std::span<const std::uint8_t> sources, int width, int height, std::span<double> out)
{
  exec == Exec::serial ? serial::squared_edt(sources, width, height, out)
                       : omp::squared_edt(sources, width, height, out);
}

}  // namespace bsplan::kernels

#endif  // BSPLAN__KERNELS_HPP_
