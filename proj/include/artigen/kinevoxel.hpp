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

#include "artigen/blueprint.hpp"

namespace artigen {

inline constexpr int kKineDim = 8;
inline constexpr int kNumJointTypes = 4;

using KineState = std::array<double, kKineDim>;

// Per-slot scale factors applied to (origin, axis, limits) before diffusion.
// The defaults map canonical origins onto [-1, 1] and revolute limits onto
// roughly [-2, 2] so the three slots have comparable magnitudes.
struct KineScales {
  double origin = 2.0;
  double axis = 1.0;
  double limits = 1.0 / kPi;

  bool operator==(const KineScales&) const = default;
};

struct KineVector {
  KineState v{};
  int type_id = 0;

  bool operator==(const KineVector&) const = default;
};

// Stable ids: fixed 0, revolute 1, continuous 2, prismatic 3.
int type_embedding_id(JointType t);
JointType joint_type_from_id(int id);  // throws Error(kInvalidJoint)

// Throws Error(kInvalidJoint) if the joint breaks the Joint invariants.
KineVector pack(const Joint& j, const KineScales& s = {});

// Axes are normalized; origins and limits are rounded to 9 significant digits.
// Throws Error(kDegenerateAxis) when a movable type has a vanishing axis slot.
Joint unpack(const KineVector& k, const KineScales& s = {});

}  // namespace artigen
