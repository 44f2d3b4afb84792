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

#include "artigen/metrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "artigen/oracles.hpp"
#include "artigen/synthgen.hpp"

namespace artigen {
namespace {

PointCloud random_cloud(std::mt19937_64& rng, int n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  PointCloud c(n);
  for (Vec3& p : c) p = {u(rng), u(rng), u(rng)};
  return c;
}

Aabb random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Aabb b;
  for (int a = 0; a < 3; ++a) {
    const double x = u(rng), y = u(rng);
    b.min[a] = std::min(x, y);
    b.max[a] = std::max(x, y);
  }
  return b;
}

TEST(Chamfer, Definitional) {
  std::mt19937_64 rng(1);
  const PointCloud p = random_cloud(rng, 200, 0.5);
  EXPECT_EQ(chamfer(p, p), 0.0);
  const PointCloud a = {{0, 0, 0}};
  const PointCloud b = {{0.1, 0, 0}};
  EXPECT_NEAR(chamfer(a, b), 10.0, 1e-12);
  EXPECT_THROW(chamfer(a, PointCloud{}), Error);
}

TEST(Chamfer, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(1, 400);
  for (int trial = 0; trial < 100; ++trial) {
    const PointCloud p = random_cloud(rng, size(rng), 0.5);
    const PointCloud q = random_cloud(rng, size(rng), trial % 2 ? 0.5 : 2.0);
    EXPECT_NEAR(chamfer(p, q), oracles::brute_chamfer(p, q), 1e-12) << trial;
    for (double tau : {0.05, 0.1}) {
      EXPECT_EQ(f1_at(p, q, tau), oracles::brute_f1(p, q, tau)) << trial;
    }
  }
}

TEST(F1, Definitional) {
  std::mt19937_64 rng(3);
  const PointCloud p = random_cloud(rng, 100, 0.5);
  EXPECT_EQ(f1_at(p, p, 0.05), 100.0);
  PointCloud far = p;
  for (Vec3& x : far) x[0] += 10.0;
  EXPECT_EQ(f1_at(p, far, 0.1), 0.0);
}

TEST(BoxIou, Definitional) {
  std::mt19937_64 rng(4);
  std::vector<Aabb> boxes;
  for (int i = 0; i < 4; ++i) boxes.push_back(random_box(rng));
  EXPECT_NEAR(bbox_iou_set(boxes, boxes), 100.0, 1e-9);
  const Aabb a{{0, 0, 0}, {1, 1, 1}};
  const Aabb b{{0.5, 0, 0}, {1.5, 1, 1}};
  EXPECT_NEAR(box_iou(a, b), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(bbox_iou_set(std::span(&a, 1), std::span(&b, 1)), 100.0 / 3.0, 1e-9);
}

TEST(BoxIou, AssignmentMatchesPermutationSearch) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int np = 1 + trial % 5;
    const int ng = 1 + (trial / 5) % 5;
    std::vector<Aabb> pred, gt;
    for (int i = 0; i < np; ++i) pred.push_back(random_box(rng));
    for (int i = 0; i < ng; ++i) gt.push_back(random_box(rng));
    EXPECT_NEAR(bbox_iou_set(pred, gt), oracles::permutation_bbox_iou(pred, gt), 1e-9) << trial;
  }
}

VoxelGrid two_part_grid() {
  VoxelGrid g(4);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 2; ++i) g.set(i, j, k, 1);
  for (int j = 0; j < 4; ++j) g.set(3, j, 0, 2);
  return g;
}

TEST(VoxelPlan, HandComputedFixture) {
  const VoxelGrid g = two_part_grid();
  const Aabb left{{-0.5, -0.5, -0.5}, {0, 0.5, 0.5}};
  const Aabb slab{{0, -0.5, -0.5}, {0.5, 0.5, -0.25}};
  const std::vector<Aabb> both = {left, slab};
  // left covers part 1 exactly; slab holds 8 voxels, 4 of them part 2.
  const VoxelPlanScores s = voxel_plan_metrics(both, g);
  EXPECT_NEAR(s.recall, 100.0, 1e-12);
  EXPECT_NEAR(s.iou, 75.0, 1e-12);
  const VoxelPlanScores one = voxel_plan_metrics(std::span(&slab, 1), g);
  EXPECT_NEAR(one.recall, 100.0 * 4 / 36, 1e-12);
  EXPECT_NEAR(one.iou, 25.0, 1e-12);
  const VoxelPlanScores none = voxel_plan_metrics({}, g);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.iou, 0.0);
  EXPECT_THROW(voxel_plan_metrics(both, VoxelGrid(4)), Error);
}

TEST(VoxelPlan, ExactPartBoxesGiveFullRecall) {
  for (Family f : kAllFamilies) {
    const AssetSample s = generate_asset(f, 2, 16);
    std::vector<Aabb> boxes;
    for (size_t p = 0; p < s.blueprint.parts.size(); ++p) {
      boxes.push_back(part_bbox(s.grid, static_cast<int>(p + 1)));
    }
    EXPECT_NEAR(voxel_plan_metrics(boxes, s.grid).recall, 100.0, 1e-12);
  }
}

Joint revolute(Vec3 origin, Vec3 axis) {
  return Joint{JointType::kRevolute, origin, axis, {0, 1}};
}

TEST(JointErrors, Axis) {
  EXPECT_EQ(joint_axis_error(revolute({0, 0, 0}, {0, 0, 1}), revolute({0, 0, 0}, {0, 0, 1})), 0.0);
  EXPECT_NEAR(joint_axis_error(revolute({0, 0, 0}, {1, 0, 0}), revolute({0, 0, 0}, {0, 1, 0})),
              kPi / 2, 1e-12);
  EXPECT_NEAR(joint_axis_error(revolute({0, 0, 0}, {0, 0, 1}), revolute({0, 0, 0}, {0, 0, -1})),
              kPi, 1e-12);
  const Joint p{JointType::kPrismatic, {0, 0, 0}, {0, 0, 1}, {0, 1}};
  EXPECT_THROW(joint_axis_error(p, revolute({0, 0, 0}, {0, 0, 1})), Error);
  EXPECT_THROW(joint_axis_error(Joint{}, Joint{}), Error);
}

TEST(JointErrors, Pivot) {
  const Joint gt = revolute({0, 0, 0}, {0, 0, 1});
  EXPECT_EQ(joint_pivot_error(revolute({0, 0, 3}, {0, 0, 1}), gt), 0.0);
  EXPECT_NEAR(joint_pivot_error(revolute({0.1, 0, 5}, {0, 0, 1}), gt), 0.1, 1e-12);
  const Joint p{JointType::kPrismatic, {0, 0, 0}, {0, 0, 1}, {0, 1}};
  EXPECT_THROW(joint_pivot_error(p, p), Error);
}

TEST(JointErrors, PivotMatchesGridSearch) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 axis{u(rng), u(rng), u(rng)};
    axis = (1.0 / norm(axis)) * axis;
    const Joint gt = revolute({u(rng), u(rng), u(rng)}, axis);
    const Joint pred = revolute({u(rng), u(rng), u(rng)}, {1, 0, 0});
    EXPECT_NEAR(joint_pivot_error(pred, gt), oracles::grid_pivot_error(pred, gt), 1e-6);
  }
}

TEST(ScaleMae, Values) {
  const std::vector<double> p = {110}, g = {100};
  EXPECT_NEAR(scale_mae(p, g), 10.0, 1e-12);
  EXPECT_EQ(scale_mae(g, g), 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 200);
  std::vector<double> a(50), b(50);
  double want = 0;
  for (int i = 0; i < 50; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    want += std::abs(a[i] - b[i]);
  }
  EXPECT_NEAR(scale_mae(a, b), want / 50, 1e-9);
  EXPECT_THROW(scale_mae(a, g), Error);
}

TEST(EvaluateAsset, SelfComparisonIsPerfect) {
  const AssetSample s = generate_asset(Family::kCabinetDoor, 5, 16);
  const MetricReport r = evaluate_asset(s.blueprint, s.grid, s.blueprint, s.grid, 1024, 3);
  // The two clouds are drawn with different seeds, so only sampling noise remains.
  EXPECT_LT(r.cd_pct.value(), 5.0);
  EXPECT_GT(r.f1_010.value(), 95.0);
  EXPECT_NEAR(r.voxel_recall.value(), 100.0, 1e-12);
  EXPECT_NEAR(r.bbox_iou.value(), 100.0, 1e-9);
  EXPECT_EQ(r.joint_axis_err.value(), 0.0);
  EXPECT_EQ(r.joint_pivot_err.value(), 0.0);
  EXPECT_NEAR(r.scale_mae.value(), 0.0, 1e-9);
  const std::vector<MetricReport> reports = {r, r};
  EXPECT_EQ(aggregate(reports).cd_pct, r.cd_pct);
}

}  // namespace
}  // namespace artigen
