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

#include "artigen/synthgen.hpp"

#include <gtest/gtest.h>

#include "artigen/error.hpp"

namespace artigen {
namespace {

TEST(Synthgen, Deterministic) {
  EXPECT_EQ(generate_asset(Family::kCabinetDoor, 7, 16), generate_asset(Family::kCabinetDoor, 7, 16));
}

TEST(Synthgen, DrawerJointsArePrismatic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Blueprint bp = generate_asset(Family::kDrawerChest, seed, 16).blueprint;
    for (size_t i = 1; i < bp.parts.size(); ++i) {
      const Joint& j = bp.parts[i].joint;
      if (bp.parts[i].parent_id != bp.parts[0].part_id) continue;
      EXPECT_EQ(j.type, JointType::kPrismatic);
      EXPECT_NEAR(norm(j.axis), 1.0, 1e-9);
      EXPECT_EQ(j.limits.first, 0.0);
      EXPECT_GT(j.limits.second, 0.0);
    }
  }
}

TEST(Synthgen, RotaryKnobHasOneContinuousJoint) {
  const Blueprint bp = generate_asset(Family::kRotaryKnob, 3, 16).blueprint;
  int continuous = 0;
  for (const Part& p : bp.parts) {
    if (p.joint.type == JointType::kContinuous) {
      ++continuous;
      EXPECT_EQ(p.joint.limits, (std::pair<double, double>{0.0, 0.0}));
    }
  }
  EXPECT_EQ(continuous, 1);
}

TEST(Synthgen, EveryAssetValidatesAndEveryPartIsVisible) {
  for (Family f : kAllFamilies) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const AssetSample s = generate_asset(f, seed, 16);
      EXPECT_TRUE(validate_blueprint(s.blueprint).empty()) << to_string(f) << " " << seed;
      for (size_t p = 0; p < s.blueprint.parts.size(); ++p) {
        EXPECT_GT(s.grid.count(static_cast<std::uint8_t>(p + 1)), 0u) << to_string(f) << " " << seed;
      }
      EXPECT_EQ(serialize_blueprint(parse_blueprint(serialize_blueprint(s.blueprint))),
                serialize_blueprint(s.blueprint));
    }
  }
}

TEST(Synthgen, DatasetOrderAndSeedSensitivity) {
  const DatasetSpec spec = {{Family::kCabinetDoor, 2}, {Family::kDrawerChest, 2}};
  const auto a = generate_dataset(spec, 0, 16);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].family, Family::kCabinetDoor);
  EXPECT_EQ(a[1].family, Family::kCabinetDoor);
  EXPECT_EQ(a[2].family, Family::kDrawerChest);
  EXPECT_EQ(a[3].family, Family::kDrawerChest);
  for (const auto& s : a) EXPECT_TRUE(validate_blueprint(s.blueprint).empty());
  const auto b = generate_dataset(spec, 1, 16);
  bool differs = false;
  for (size_t i = 0; i < 4; ++i) differs = differs || !(a[i].blueprint == b[i].blueprint);
  EXPECT_TRUE(differs);
}

TEST(Synthgen, SpecParsing) {
  const DatasetSpec spec = parse_dataset_spec("cabinet_door=2,rotary_knob=1");
  ASSERT_EQ(spec.size(), 2u);
  EXPECT_EQ(spec[1], (std::pair<Family, int>{Family::kRotaryKnob, 1}));
  EXPECT_THROW(parse_dataset_spec("spaceship=2"), Error);
  EXPECT_THROW(parse_dataset_spec("cabinet_door"), Error);
  EXPECT_THROW(generate_asset(Family::kCabinetDoor, 0, 4), Error);
}

}  // namespace
}  // namespace artigen
