// Copyright 2026 The Artigen Authors
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

#pragma once

#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen {

// Structural slice of a blueprint: what the generator consumes.
struct Plan {
  std::vector<Aabb> boxes;
  std::vector<int> parents;  // -1 for the root
  std::vector<JointType> joint_types;

  bool operator==(const Plan&) const = default;
};

struct PlannerOptions {
  // A part is a thin panel when its smallest extent is at most this fraction
  // of its largest extent.
  double thin_ratio = 0.15;
  // A part is small when its voxel count is at most this fraction of the root's.
  double small_ratio = 0.1;
};

// Identity on grids that already carry more than one part label; otherwise the
// 6-connected components become parts, labeled by descending size.
VoxelGrid segment_parts(const VoxelGrid& g);

Plan plan_blueprint(const VoxelGrid& g, const PlannerOptions& opts = {});

// Plan extracted from an existing blueprint (boxes and joint types as given).
Plan plan_from_blueprint(const Blueprint& bp);

// Minimal valid blueprint around a plan. Joint parameters are placeholders
// anchored at the contact face between child and parent.
Blueprint plan_skeleton(const Plan& plan, double real_scale_m = 1.0);

}  // namespace artigen
