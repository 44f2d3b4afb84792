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

#include "artigen/voxelgrid.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "artigen/synthgen.hpp"
#include "test_util.hpp"

namespace artigen {
namespace {

constexpr Aabb kFull{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};

TEST(VoxelGrid, ResolutionBounds) {
  EXPECT_THROW(VoxelGrid(1), Error);
  EXPECT_THROW(VoxelGrid(257), Error);
  EXPECT_EQ(VoxelGrid(4).size(), 64u);
}

TEST(VoxelGrid, FullBoxFillsEveryVoxel) {
  const VoxelGrid g = rasterize_boxes(std::span(&kFull, 1), 4);
  EXPECT_EQ(g.count(1), 64u);
}

TEST(VoxelGrid, DisjointBoxesPartition) {
  const std::vector<Aabb> boxes = {{{-0.5, -0.5, -0.5}, {0, 0.5, 0.5}},
                                   {{0, -0.5, -0.5}, {0.5, 0.5, 0.5}}};
  const VoxelGrid g = rasterize_boxes(boxes, 8);
  EXPECT_EQ(g.count(1), 256u);
  EXPECT_EQ(g.count(2), 256u);
  EXPECT_EQ(g.occupied(), 512u);
}

TEST(VoxelGrid, LaterBoxWinsOverlap) {
  const std::vector<Aabb> boxes = {{{-0.5, -0.5, -0.5}, {0.25, 0.5, 0.5}},
                                   {{-0.25, -0.5, -0.5}, {0.5, 0.5, 0.5}}};
  const VoxelGrid g = rasterize_boxes(boxes, 4);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(g.at(0, j, k), 1);
      for (int i = 1; i < 4; ++i) EXPECT_EQ(g.at(i, j, k), 2);
    }
  }
}

TEST(VoxelGrid, PartBbox) {
  const VoxelGrid full = rasterize_boxes(std::span(&kFull, 1), 16);
  EXPECT_EQ(part_bbox(full, 1), kFull);
  VoxelGrid one(16);
  one.set(0, 0, 0, 1);
  const Aabb b = part_bbox(one, 1);
  EXPECT_EQ(b.min, (Vec3{-0.5, -0.5, -0.5}));
  EXPECT_EQ(b.max, (Vec3{-0.4375, -0.4375, -0.4375}));
  EXPECT_THROW(part_bbox(one, 2), Error);
}

TEST(VoxelGrid, RasterizeThenBboxWithinOneVoxel) {
  for (Family f : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const AssetSample s = generate_asset(f, seed, 16);
      std::vector<Aabb> shapes;
      for (const Part& p : s.blueprint.parts) shapes.push_back(p.bbox);
      const VoxelGrid g = rasterize_parts(s.blueprint, shapes, 16);
      for (size_t p = 0; p < shapes.size(); ++p) {
        if (g.count(static_cast<std::uint8_t>(p + 1)) == 0) continue;
        const Aabb b = part_bbox(g, static_cast<int>(p + 1));
        for (int a = 0; a < 3; ++a) {
          EXPECT_LE(std::abs(b.min[a] - shapes[p].min[a]), 1.0 / 16 + 1e-12);
          EXPECT_LE(std::abs(b.max[a] - shapes[p].max[a]), 1.0 / 16 + 1e-12);
        }
      }
    }
  }
}

TEST(VoxelGrid, SurfacePointsDeterministic) {
  const VoxelGrid g = generate_asset(Family::kCabinetDoor, 3, 16).grid;
  EXPECT_EQ(surface_points(g, 500, 9), surface_points(g, 500, 9));
  EXPECT_THROW(surface_points(VoxelGrid(8), 10, 0), Error);
}

TEST(VoxelGrid, SingleVoxelFacesAllSampled) {
  VoxelGrid g(8);
  g.set(3, 4, 5, 1);
  const Vec3 c = g.center(3, 4, 5);
  const double h = 0.5 / 8;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointCloud pts = surface_points(g, 600, seed);
    ASSERT_EQ(pts.size(), 600u);
    int faces[6] = {0, 0, 0, 0, 0, 0};
    for (const Vec3& p : pts) {
      int hit = -1;
      for (int a = 0; a < 3; ++a) {
        ASSERT_LE(std::abs(p[a] - c[a]), h + 1e-12);
        if (std::abs(p[a] - (c[a] - h)) < 1e-12) hit = 2 * a;
        if (std::abs(p[a] - (c[a] + h)) < 1e-12) hit = 2 * a + 1;
      }
      ASSERT_GE(hit, 0);
      ++faces[hit];
    }
    for (int f = 0; f < 6; ++f) EXPECT_GE(faces[f], 50) << "seed " << seed << " face " << f;
  }
}

TEST(VoxelGrid, SolidGridSamplesOnlyTheShell) {
  const VoxelGrid g = rasterize_boxes(std::span(&kFull, 1), 8);
  for (const Vec3& p : surface_points(g, 1000, 4)) {
    const double m = std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2])});
    EXPECT_NEAR(m, 0.5, 1e-12);
  }
}

TEST(VoxelGrid, OccupancyField) {
  const VoxelGrid empty(4);
  for (double v : occupancy_to_field(empty)) EXPECT_EQ(v, -1.0);
  const VoxelGrid full = rasterize_boxes(std::span(&kFull, 1), 4);
  for (double v : occupancy_to_field(full)) EXPECT_EQ(v, 1.0);
  const VoxelGrid g = generate_asset(Family::kHingedLid, 1, 16).grid;
  const VoxelGrid back = field_to_occupancy(occupancy_to_field(g), 16);
  for (size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.labels()[i] > 0, g.labels()[i] > 0);
}

TEST(VoxelGrid, KvoxRoundTrip) {
  const VoxelGrid g = generate_asset(Family::kDrawerChest, 2, 16).grid;
  const auto bytes = encode_kvox(g);
  EXPECT_EQ(bytes.size(), 5u + 4u + 4096u);
  EXPECT_EQ(decode_kvox(bytes), g);
  std::vector<std::uint8_t> bad(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(decode_kvox(bad), Error);
}

}  // namespace
}  // namespace artigen
