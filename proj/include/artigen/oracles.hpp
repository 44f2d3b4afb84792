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

// Slow, obviously-correct reference implementations used by the tests, the
// acceptance suite and `selftest` to check the fast paths.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/diffusion/flow.hpp"
#include "artigen/geometry.hpp"

namespace artigen::oracles {

// Exhaustive O(|P||Q|) versions of metrics::chamfer and metrics::f1_at.
double brute_chamfer(std::span<const Vec3> p, std::span<const Vec3> q);
double brute_f1(std::span<const Vec3> p, std::span<const Vec3> q, double tau);

// Best total IoU over every injective matching of the smaller list into the
// larger one, normalized like bbox_iou_set. Intended for n <= 7.
double permutation_bbox_iou(std::span<const Aabb> pred, std::span<const Aabb> gt);

// Distance from pred.origin to gt's axis line, minimized over s by repeated
// dense grid refinement over s in [-s_range, s_range].
double grid_pivot_error(const Joint& pred, const Joint& gt, double s_range = 4.0);

struct GradCheckReport {
  int probes = 0;
  double max_rel_error = 0.0;
  std::string worst_param;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences of the batch loss (fixed rng seed per evaluation)
// against the analytic gradient. Probes pick a tensor uniformly, then an
// entry within it. rel = |a - n| / max(|a|, |n|, floor).
GradCheckReport gradient_check(diffusion::Denoiser& model,
                               std::span<const diffusion::TrainingExample> data,
                               std::uint64_t seed, int probes, double h = 1e-4,
                               double floor = 1e-8);

}  // namespace artigen::oracles
