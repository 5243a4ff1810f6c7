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

#ifndef BSPLAN__GEOMETRY_HPP_
#define BSPLAN__GEOMETRY_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsplan
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 & operator+=(const Vec2 & o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 & operator-=(const Vec2 & o)
  {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2 & operator*=(double s)
  {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2 & b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2 & b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return Vec2{a.x / s, a.y / s}; }
  friend constexpr Vec2 operator-(const Vec2 & a) { return Vec2{-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline Vec2 unit_from_angle(double theta) { return Vec2{std::cos(theta), std::sin(theta)}; }
constexpr Vec2 perp(const Vec2 & a) { return Vec2{-a.y, a.x}; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

/// Planar vehicle pose with signed path curvature.
struct Configuration
{
  double x{0.0};      // m
  double y{0.0};      // m
  double theta{0.0};  // rad
  double kappa{0.0};  // 1/m

  Vec2 position() const { return Vec2{x, y}; }
  friend bool operator==(const Configuration &, const Configuration &) = default;
};

// Error categories. Every failure in the library is reported as one of these.
struct ContractError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error
{
  using std::domain_error::domain_error;
};
struct ParseError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};
struct DegenerateProblem : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

}  // namespace bsplan

#endif  // BSPLAN__GEOMETRY_HPP_
