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

#include "artigen/kinevoxel.hpp"

#include <set>

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "test_util.hpp"

namespace artigen {
namespace {

TEST(KineVoxel, PackRevolute) {
  const Joint j{JointType::kRevolute, {0.25, 0, -0.25}, {0, 0, 1}, {0, kPi / 2}};
  const KineVector k = pack(j);
  const KineState want{0.5, 0, -0.5, 0, 0, 1, 0, 0.5};
  for (int i = 0; i < kKineDim; ++i) EXPECT_DOUBLE_EQ(k.v[i], want[i]) << i;
  EXPECT_EQ(k.type_id, 1);
}

TEST(KineVoxel, PackFixedAndContinuous) {
  const KineVector f = pack(Joint{});
  EXPECT_EQ(f.v, KineState{});
  EXPECT_EQ(f.type_id, 0);
  const KineVector c = pack(Joint{JointType::kContinuous, {0, 0, 0}, {1, 0, 0}, {0, 0}});
  EXPECT_EQ(c.v, (KineState{0, 0, 0, 1, 0, 0, 0, 0}));
  EXPECT_EQ(c.type_id, 2);
}

TEST(KineVoxel, PackRejectsBrokenJoint) {
  EXPECT_THROW(pack(Joint{JointType::kRevolute, {0, 0, 0}, {0, 0, 2}, {0, 1}}), Error);
}

TEST(KineVoxel, CorpusJointsRoundTripExactly) {
  for (const DatasetEntry& e : testing::corpus()) {
    for (const Part& p : e.blueprint.parts) {
      EXPECT_EQ(unpack(pack(p.joint)), p.joint) << e.id << " " << p.part_id;
    }
  }
}

TEST(KineVoxel, DegenerateAxis) {
  KineVector k;
  k.type_id = 1;
  try {
    unpack(k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegenerateAxis);
  }
}

TEST(KineVoxel, NoisyAxisIsNormalized) {
  KineVector k;
  k.type_id = 3;
  k.v = {0, 0, 0, 0, 0, 0.97, 0, 0.1};
  const Joint j = unpack(k);
  EXPECT_EQ(j.axis, (Vec3{0, 0, 1}));
  EXPECT_EQ(j.type, JointType::kPrismatic);
}

TEST(KineVoxel, TypeIds) {
  EXPECT_EQ(type_embedding_id(JointType::kFixed), 0);
  EXPECT_EQ(type_embedding_id(JointType::kPrismatic), 3);
  std::set<int> ids;
  for (int t = 0; t < kNumJointTypes; ++t) {
    const auto jt = static_cast<JointType>(t);
    ids.insert(type_embedding_id(jt));
    EXPECT_EQ(joint_type_from_id(type_embedding_id(jt)), jt);
  }
  EXPECT_EQ(ids.size(), 4u);
  EXPECT_THROW(joint_type_from_id(4), Error);
}

}  // namespace
}  // namespace artigen
