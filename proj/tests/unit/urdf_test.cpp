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

#include "artigen/urdf.hpp"

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "artigen/synthgen.hpp"
#include "test_util.hpp"

namespace artigen {
namespace {

VoxelGrid from_boxes(const std::vector<VoxelBox>& boxes, int r, std::uint8_t label) {
  VoxelGrid g(r);
  for (const VoxelBox& b : boxes)
    for (int k = b.lo[2]; k < b.hi[2]; ++k)
      for (int j = b.lo[1]; j < b.hi[1]; ++j)
        for (int i = b.lo[0]; i < b.hi[0]; ++i) g.set(i, j, k, label);
  return g;
}

Errc parse_error(const std::string& xml) {
  try {
    parse_urdf(xml);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIo;
}

TEST(GreedyMerge, SolidCuboidIsOneBox) {
  const VoxelGrid g = from_boxes({{{2, 2, 2}, {6, 6, 6}}}, 8, 1);
  const auto boxes = greedy_merge(g, 1);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (VoxelBox{{2, 2, 2}, {6, 6, 6}}));
  EXPECT_THROW(greedy_merge(g, 2), Error);
}

TEST(GreedyMerge, LShapeIsAtMostTwoBoxes) {
  const VoxelGrid g = from_boxes({{{0, 0, 0}, {6, 2, 3}}, {{0, 2, 0}, {2, 6, 3}}}, 8, 1);
  const auto boxes = greedy_merge(g, 1);
  EXPECT_LE(boxes.size(), 2u);
  EXPECT_EQ(from_boxes(boxes, 8, 1), g);
}

TEST(GreedyMerge, CorpusPartsReRasterizeExactly) {
  for (const DatasetEntry& e : testing::corpus()) {
    for (size_t p = 0; p < e.blueprint.parts.size(); ++p) {
      const int label = static_cast<int>(p + 1);
      const auto boxes = greedy_merge(e.grid, label);
      const VoxelGrid back = from_boxes(boxes, e.grid.resolution(), 1);
      for (size_t v = 0; v < back.size(); ++v) {
        ASSERT_EQ(back.labels()[v] == 1, e.grid.labels()[v] == label) << e.id << " part " << p;
      }
    }
  }
}

TEST(Urdf, SinglePartAsset) {
  Blueprint bp;
  bp.asset_id = "block";
  bp.category = "block";
  bp.usage_scene = "desk";
  bp.real_scale_m = 0.2;
  Part p;
  p.part_id = "body";
  p.label = "body";
  p.bbox = {{-0.25, -0.25, -0.25}, {0.25, 0.25, 0.25}};
  p.mass_kg = 1.0;
  bp.parts = {p};
  const std::vector<Aabb> shapes = {p.bbox};
  const UrdfDocument doc = to_urdf(bp, rasterize_parts(bp, shapes, 8));
  ASSERT_EQ(doc.links.size(), 1u);
  EXPECT_TRUE(doc.joints.empty());
  ASSERT_EQ(doc.links[0].boxes.size(), 1u);
  EXPECT_NEAR(doc.links[0].boxes[0].size[0], 0.2, 1e-9);
}

TEST(Urdf, CabinetDoorJointLimits) {
  AssetSample s;
  for (std::uint64_t seed = 0;; ++seed) {
    s = generate_asset(Family::kCabinetDoor, seed, 16);
    if (s.blueprint.parts.size() == 2) break;
  }
  const UrdfDocument doc = to_urdf(s.blueprint, s.grid);
  EXPECT_EQ(doc.links.size(), 2u);
  ASSERT_EQ(doc.joints.size(), 1u);
  EXPECT_EQ(doc.joints[0].type, JointType::kRevolute);
  ASSERT_TRUE(doc.joints[0].limit.has_value());
  EXPECT_NEAR(doc.joints[0].limit->lower, 0.0, 1e-4);
  EXPECT_NEAR(doc.joints[0].limit->upper, 1.5708, 1e-4);
}

TEST(Urdf, CorpusExportsRoundTrip) {
  for (const DatasetEntry& e : testing::corpus()) {
    const UrdfDocument doc = to_urdf(e.blueprint, e.grid);
    EXPECT_EQ(doc.joints.size(), e.blueprint.parts.size() - 1) << e.id;
    const std::string xml = serialize_urdf(doc);
    EXPECT_EQ(parse_urdf(xml), doc) << e.id;
    EXPECT_EQ(serialize_urdf(parse_urdf(xml)), xml) << e.id;
  }
}

TEST(Urdf, InvalidBlueprintIsRejected) {
  const DatasetEntry e = testing::corpus()[0];
  Blueprint bp = e.blueprint;
  bp.parts[1].joint.axis = {0, 0, 2};
  try {
    to_urdf(bp, e.grid);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kInvalidBlueprint);
  }
}

TEST(Urdf, ReaderRejectsOutsideTheSubset) {
  const DatasetEntry e = testing::corpus()[0];
  std::string xml = serialize_urdf(to_urdf(e.blueprint, e.grid));
  EXPECT_EQ(parse_error(""), Errc::kXmlSyntax);
  EXPECT_EQ(parse_error("<robot name=\"x\">"), Errc::kXmlSyntax);
  const auto pos = xml.find("type=\"revolute\"");
  ASSERT_NE(pos, std::string::npos);
  std::string planar = xml;
  planar.replace(pos, 15, "type=\"planar\"");
  EXPECT_EQ(parse_error(planar), Errc::kUnsupportedElement);
  std::string sphere = xml;
  const auto box = sphere.find("<box ");
  ASSERT_NE(box, std::string::npos);
  sphere.replace(box, 5, "<sphere radius=\"1\" ");
  EXPECT_NE(parse_error(sphere), Errc::kIo);
}

}  // namespace
}  // namespace artigen
