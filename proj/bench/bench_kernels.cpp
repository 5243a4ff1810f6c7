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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "bsplan/kernels.hpp"
#include "bsplan/suite.hpp"

namespace
{

using namespace bsplan;

ControlPolygon random_polygon(std::size_t n)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  ControlPolygon p(n);
  for (auto & q : p) {
    q = {u(rng), u(rng)};
  }
  return p;
}

template <auto Kernel>
void apply_basis(benchmark::State & state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const SplineSampler sampler(make_knots(std::min<int>(7, static_cast<int>(n) - 1), n), kDefaultSamples);
  const ControlPolygon poly = random_polygon(n);
  std::vector<Vec2> out(kDefaultSamples);
  for (auto _ : state) {
    Kernel(sampler.position_basis(), poly, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void basis_transpose(benchmark::State & state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const SplineSampler sampler(make_knots(std::min<int>(7, static_cast<int>(n) - 1), n), kDefaultSamples);
  const ControlPolygon grad = random_polygon(kDefaultSamples);
  std::vector<Vec2> out(n);
  for (auto _ : state) {
    Kernel(sampler.first_basis(), grad, out);
    benchmark::DoNotOptimize(out.data());
  }
}

struct Scene
{
  std::shared_ptr<const OccupancyGrid> grid;
  std::vector<Vec2> positions;
  std::vector<double> headings;
};

const Scene & scene()
{
  static const Scene s = [] {
    SuiteKnobs knobs;
    knobs.obstacle_count = 6;
    Scene out;
    out.grid = generate_suite("obstacle-field", 1, 3, knobs).scenarios.front().grid;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, out.grid->width_m());
    std::uniform_real_distribution<double> h(-3.2, 3.2);
    for (std::size_t i = 0; i < kDefaultSamples; ++i) {
      out.positions.push_back({u(rng), u(rng)});
      out.headings.push_back(h(rng));
    }
    return out;
  }();
  return s;
}

template <auto Kernel, CheckMode Mode>
void collision_flags(benchmark::State & state)
{
  const Scene & s = scene();
  const CollisionChecker checker(*s.grid, VehicleParams{});
  std::vector<std::uint8_t> flags(s.positions.size());
  for (auto _ : state) {
    Kernel(checker, s.positions, s.headings, flags, Mode);
    benchmark::DoNotOptimize(flags.data());
  }
}

template <auto Kernel>
void squared_edt(benchmark::State & state)
{
  const Scene & s = scene();
  std::vector<double> out(s.grid->cells().size());
  for (auto _ : state) {
    Kernel(s.grid->cells(), s.grid->width(), s.grid->height(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(apply_basis<kernels::serial::apply_basis>)->Name("apply_basis/serial")->Arg(6)->Arg(12)->Arg(36);
BENCHMARK(apply_basis<kernels::omp::apply_basis>)->Name("apply_basis/omp")->Arg(6)->Arg(12)->Arg(36);
BENCHMARK(basis_transpose<kernels::serial::accumulate_basis_transpose>)
  ->Name("basis_transpose/serial")
  ->Arg(6)
  ->Arg(12)
  ->Arg(36);
BENCHMARK(basis_transpose<kernels::omp::accumulate_basis_transpose>)
  ->Name("basis_transpose/omp")
  ->Arg(6)
  ->Arg(12)
  ->Arg(36);
BENCHMARK(collision_flags<kernels::serial::collision_flags, CheckMode::pruned>)->Name("collision_flags/serial");
BENCHMARK(collision_flags<kernels::omp::collision_flags, CheckMode::pruned>)->Name("collision_flags/omp");
BENCHMARK(collision_flags<kernels::serial::collision_flags, CheckMode::fixed_cost>)
  ->Name("collision_flags_fixed_cost/serial");
BENCHMARK(collision_flags<kernels::omp::collision_flags, CheckMode::fixed_cost>)
  ->Name("collision_flags_fixed_cost/omp");
BENCHMARK(squared_edt<kernels::serial::squared_edt>)->Name("squared_edt/serial");
BENCHMARK(squared_edt<kernels::omp::squared_edt>)->Name("squared_edt/omp");

BENCHMARK_MAIN();
