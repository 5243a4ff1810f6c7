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

#ifndef BSPLAN__RENDER_HPP_
#define BSPLAN__RENDER_HPP_

#include <filesystem>
#include <iosfwd>

#include "bsplan/planner.hpp"

namespace bsplan
{

struct RenderOptions
{
  double pixels_per_meter{20.0};
  std::size_t footprint_every{32};
};

/// SVG of the map, the reference path, the planned path, the control polygon
/// with its tree edges and the footprint swath. Green means feasible, red
/// marks violating samples. Output depends only on the inputs.
void render_svg(
  std::ostream & out, const PlanResult & result, const PlanningContext & ctx, const PathModel & model,
  const RenderOptions & opts = {});
void render_svg(
  const std::filesystem::path & path, const PlanResult & result, const PlanningContext & ctx, const PathModel & model,
  const RenderOptions & opts = {});

}  // namespace bsplan

#endif  // BSPLAN__RENDER_HPP_
