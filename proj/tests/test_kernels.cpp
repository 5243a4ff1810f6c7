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

#include <doctest.h>

#include "bsplan/kernels.hpp"
#include "oracles.hpp"

using namespace bsplan;

TEST_CASE("basis products")
{
  oracles::Rand r(2);
  const SplineSampler sampler(make_knots(7, 20), kDefaultSamples);
  ControlPolygon poly(20);
  for (auto & p : poly) {
    p = {r.uniform(-9, 9), r.uniform(-9, 9)};
  }
  std::vector<Vec2> a(kDefaultSamples);
  std::vector<Vec2> b(kDefaultSamples);
  kernels::serial::apply_basis(sampler.first_basis(), poly, a);
  kernels::omp::apply_basis(sampler.first_basis(), poly, b);
  CHECK(a == b);

  // hand product for one row
  Vec2 row{};
  for (std::size_t j = 0; j < poly.size(); ++j) {
    row += sampler.first_basis()(100, j) * poly[j];
  }
  CHECK(norm(row - a[100]) < 1e-12);

  std::vector<Vec2> ga(20, Vec2{1, -1});
  std::vector<Vec2> gb(20, Vec2{1, -1});
  kernels::serial::accumulate_basis_transpose(sampler.second_basis(), a, ga);
  kernels::omp::accumulate_basis_transpose(sampler.second_basis(), a, gb);
  CHECK(ga == gb);
  Vec2 col{1, -1};
  for (std::size_t s = 0; s < a.size(); ++s) {
    col += sampler.second_basis()(s, 7) * a[s];
  }
  CHECK(norm(col - ga[7]) < 1e-9 * (1.0 + norm(col)));

  // dispatchers follow the exec tag
  std::vector<Vec2> c(kDefaultSamples);
  kernels::apply_basis(Exec::serial, sampler.first_basis(), poly, c);
  CHECK(c == a);
}

TEST_CASE("squared distance transform")
{
  // single source in a 5 x 3 grid
  std::vector<std::uint8_t> src(15, 0);
  src[1 * 5 + 2] = 1;
  std::vector<double> out(15);
  kernels::serial::squared_edt(src, 5, 3, out);
  CHECK(out[1 * 5 + 2] == 0.0);
  CHECK(out[0] == 5.0);
  CHECK(out[2 * 5 + 4] == 5.0);
  CHECK(out[1 * 5 + 0] == 4.0);

  std::vector<std::uint8_t> none(15, 0);
  kernels::omp::squared_edt(none, 5, 3, out);
  CHECK(std::isinf(out[7]));

  // brute force on a random pattern
  oracles::Rand r(8);
  const int w = 37;
  const int h = 23;
  std::vector<std::uint8_t> rnd(static_cast<std::size_t>(w * h));
  for (auto & c : rnd) {
    c = r.uniform(0, 1) < 0.05 ? 1 : 0;
  }
  std::vector<double> fast(rnd.size());
  kernels::omp::squared_edt(rnd, w, h, fast);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (int yy = 0; yy < h; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
          if (rnd[static_cast<std::size_t>(yy * w + xx)]) {
            best = std::min(best, double((x - xx) * (x - xx) + (y - yy) * (y - yy)));
          }
        }
      }
      CHECK(fast[static_cast<std::size_t>(y * w + x)] == best);
    }
  }
}
