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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen {

// Values absent when the metric does not apply to an asset.
struct MetricReport {
  std::optional<double> cd_pct;
  std::optional<double> f1_010;
  std::optional<double> f1_005;
  std::optional<double> voxel_recall;
  std::optional<double> voxel_iou;
  std::optional<double> bbox_iou;
  std::optional<double> joint_axis_err;
  std::optional<double> joint_pivot_err;
  std::optional<double> scale_mae;
};

// Column order of the eval CSV, after the leading "asset" column.
inline constexpr const char* kMetricColumns[] = {
    "cd_pct", "f1_010", "f1_005", "voxel_recall", "voxel_iou",
    "bbox_iou", "joint_axis_err", "joint_pivot_err", "scale_mae"};

std::vector<std::optional<double>> report_values(const MetricReport& r);

// Nearest-neighbor distances from each query point to `cloud`, using a
// uniform-grid accelerator. Results are identical to exhaustive search.
std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> cloud);

// 100 * 0.5 * (mean NN distance P->Q + mean NN distance Q->P).
double chamfer(std::span<const Vec3> p, std::span<const Vec3> q);

// F1 (percent) where a point counts when its NN distance is strictly below tau.
double f1_at(std::span<const Vec3> p, std::span<const Vec3> q, double tau);

double box_iou(const Aabb& a, const Aabb& b);

// Maximum-weight one-to-one assignment on a rows x cols score matrix.
// Returns, for every row, the matched column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score);

// 100 * (sum of optimally matched IoUs) / max(|pred|, |gt|).
double bbox_iou_set(std::span<const Aabb> pred, std::span<const Aabb> gt);

struct VoxelPlanScores {
  double recall = 0.0;
  double iou = 0.0;
};
VoxelPlanScores voxel_plan_metrics(std::span<const Aabb> pred_boxes, const VoxelGrid& gt);

double joint_axis_error(const Joint& pred, const Joint& gt);
double joint_pivot_error(const Joint& pred, const Joint& gt);
double scale_mae(std::span<const double> pred, std::span<const double> gt);

// Per-asset report comparing a predicted asset with its ground truth.
// Joints are compared part-by-part for parts whose types agree.
MetricReport evaluate_asset(const Blueprint& pred_bp, const VoxelGrid& pred_grid,
                            const Blueprint& gt_bp, const VoxelGrid& gt_grid,
                            int surface_samples = 2048, std::uint64_t seed = 0);

// Mean of the present values per column.
MetricReport aggregate(std::span<const MetricReport> reports);

}  // namespace artigen
