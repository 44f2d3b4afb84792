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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen {

// Voxel-index box, half-open: [lo, hi).
struct VoxelBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  bool operator==(const VoxelBox&) const = default;
  Aabb canonical(int resolution) const;
};

// Disjoint boxes covering exactly the voxels labeled `label`, grown greedily
// along x, then y, then z from each uncovered voxel in storage order.
// Throws Error(kEmptyPart).
std::vector<VoxelBox> greedy_merge(const VoxelGrid& g, int label);

struct UrdfBox {
  Vec3 xyz{};   // center in the link frame
  Vec3 size{};

  bool operator==(const UrdfBox&) const = default;
};

struct UrdfInertial {
  Vec3 xyz{};
  double mass = 0.0;
  double ixx = 0.0;
  double iyy = 0.0;
  double izz = 0.0;

  bool operator==(const UrdfInertial&) const = default;
};

struct UrdfLink {
  std::string name;
  std::string material;
  std::array<double, 4> rgba{};
  UrdfInertial inertial;
  std::vector<UrdfBox> boxes;  // emitted as matching visual and collision pairs

  bool operator==(const UrdfLink&) const = default;
};

struct UrdfLimit {
  double lower = 0.0;
  double upper = 0.0;
  double effort = 0.0;
  double velocity = 0.0;

  bool operator==(const UrdfLimit&) const = default;
};

struct UrdfJoint {
  std::string name;
  JointType type = JointType::kFixed;
  std::string parent;
  std::string child;
  Vec3 origin{};  // child frame in the parent frame
  Vec3 axis{1.0, 0.0, 0.0};
  std::optional<UrdfLimit> limit;

  bool operator==(const UrdfJoint&) const = default;
};

struct UrdfDocument {
  std::string name;
  std::vector<UrdfLink> links;
  std::vector<UrdfJoint> joints;

  bool operator==(const UrdfDocument&) const = default;
};

inline constexpr double kLimitEffort = 10.0;
inline constexpr double kLimitVelocity = 1.0;

// Metric document for a valid blueprint and its labeled grid. The root link
// frame is the world frame with the canonical origin at 0; each movable
// child's frame sits on its joint origin, each fixed child shares its
// parent's frame. Lengths are canonical * real_scale_m / (longest extent of
// the union of part boxes). Every real is rounded to 9 significant digits.
// Throws Error(kInvalidBlueprint) or Error(kEmptyPart).
UrdfDocument to_urdf(const Blueprint& bp, const VoxelGrid& g);

std::string serialize_urdf(const UrdfDocument& doc);

// Reads the subset written by serialize_urdf.
// Throws Error(kXmlSyntax) or Error(kUnsupportedElement).
UrdfDocument parse_urdf(std::string_view xml);

}  // namespace artigen
