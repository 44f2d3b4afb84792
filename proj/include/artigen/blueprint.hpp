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
#include <string_view>
#include <utility>
#include <vector>

#include "artigen/geometry.hpp"

namespace artigen {

enum class JointType { kFixed = 0, kRevolute = 1, kContinuous = 2, kPrismatic = 3 };

enum class Material {
  kMetal, kWood, kPlastic, kGlass, kFabric, kCeramic,
  kRubber, kStone, kPaper, kLeather, kOther,
};

enum class Affordance {
  kPushable, kPullable, kGraspable, kRotatable, kPressable, kSlidable, kOpenable,
};

std::string_view to_string(JointType t);
std::string_view to_string(Material m);
std::string_view to_string(Affordance a);
std::optional<JointType> parse_joint_type(std::string_view s);
std::optional<Material> parse_material(std::string_view s);
std::optional<Affordance> parse_affordance(std::string_view s);

inline bool is_movable(JointType t) { return t != JointType::kFixed; }

struct Joint {
  JointType type = JointType::kFixed;
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 axis{0.0, 0.0, 0.0};
  // Radians for revolute, canonical length units for prismatic.
  std::pair<double, double> limits{0.0, 0.0};

  bool operator==(const Joint&) const = default;
};

struct Part {
  std::string part_id;
  std::optional<std::string> parent_id;
  std::string label;
  Aabb bbox;
  Material material = Material::kOther;
  double mass_kg = 0.0;
  std::string function;
  std::vector<std::string> states;
  std::vector<Affordance> affordances;
  Joint joint;

  bool operator==(const Part&) const = default;
};

struct Blueprint {
  std::string asset_id;
  std::string category;
  std::string usage_scene;
  double real_scale_m = 1.0;  // longest asset dimension, meters
  std::vector<Part> parts;

  bool operator==(const Blueprint&) const = default;
};

enum class ViolationCode {
  kNoRoot,
  kMultiRoot,
  kCycle,
  kDanglingParent,
  kDupId,
  kAxisNotUnit,
  kLimitsReversed,
  kBboxOutOfCanon,
  kBboxInverted,
  kFixedNonzero,
};

std::string_view to_string(ViolationCode c);

struct Violation {
  ViolationCode code;
  int part_index = -1;  // -1 for blueprint-level violations
  std::string message;
};

inline constexpr double kAxisUnitTolerance = 1e-6;
inline constexpr double kCanonTolerance = 1e-9;

// Throws Error with kSyntax, kSchema or kVocab.
Blueprint parse_blueprint(std::string_view text);

std::vector<Violation> validate_blueprint(const Blueprint& bp);

// Canonical JSON form. Throws Error(kInvalid) when validation fails.
std::string serialize_blueprint(const Blueprint& bp);

// Index of the unique root, or -1 when the tree is broken.
int root_index(const Blueprint& bp);

// parent index per part (-1 for root or unresolved parent).
std::vector<int> parent_indices(const Blueprint& bp);

}  // namespace artigen
