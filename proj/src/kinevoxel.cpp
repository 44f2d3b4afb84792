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

#include <algorithm>
#include <cmath>

#include "artigen/error.hpp"

namespace artigen {

namespace {

constexpr double kDegenerateAxisNorm = 1e-6;

void check_scales(const KineScales& s) {
  if (!(s.origin > 0.0 && s.axis > 0.0 && s.limits > 0.0)) {
    throw Error(Errc::kInvalidJoint, "kinematic scales must be positive");
  }
}

}  // namespace

int type_embedding_id(JointType t) { return static_cast<int>(t); }

JointType joint_type_from_id(int id) {
  if (id < 0 || id >= kNumJointTypes) {
    throw Error(Errc::kInvalidJoint, "joint type id " + std::to_string(id));
  }
  return static_cast<JointType>(id);
}

KineVector pack(const Joint& j, const KineScales& s) {
  check_scales(s);
  Blueprint probe;
  Part part;
  part.part_id = "p";
  part.joint = j;
  probe.parts.push_back(part);
  for (const Violation& v : validate_blueprint(probe)) {
    throw Error(Errc::kInvalidJoint, std::string(to_string(v.code)) + ": " + v.message);
  }

  KineVector out;
  out.type_id = type_embedding_id(j.type);
  if (j.type == JointType::kFixed) return out;
  for (int a = 0; a < 3; ++a) {
    out.v[a] = s.origin * j.origin[a];
    out.v[3 + a] = s.axis * j.axis[a];
  }
  out.v[6] = s.limits * j.limits.first;
  out.v[7] = s.limits * j.limits.second;
  return out;
}

Joint unpack(const KineVector& k, const KineScales& s) {
  check_scales(s);
  Joint j;
  j.type = joint_type_from_id(k.type_id);
  if (j.type == JointType::kFixed) return j;

  Vec3 axis{k.v[3] / s.axis, k.v[4] / s.axis, k.v[5] / s.axis};
  const double n = norm(axis);
  if (!(n >= kDegenerateAxisNorm)) {
    throw Error(Errc::kDegenerateAxis, "axis slot norm " + format_real(n));
  }
  // Unit axes pass through untouched so pack/unpack round trips exactly.
  if (std::abs(n - 1.0) > 1e-15) axis = (1.0 / n) * axis;

  // Origins and limits come back in the 9-digit canonical form, which undoes
  // the rounding of the scale factors for canonical inputs.
  for (int a = 0; a < 3; ++a) j.origin[a] = canonical_real(k.v[a] / s.origin);
  j.axis = axis;
  if (j.type == JointType::kContinuous) return j;

  double lo = canonical_real(k.v[6] / s.limits);
  double hi = canonical_real(k.v[7] / s.limits);
  if (lo > hi) std::swap(lo, hi);
  if (j.type == JointType::kRevolute) {
    lo = std::clamp(lo, -2.0 * kPi, 2.0 * kPi);
    hi = std::clamp(hi, -2.0 * kPi, 2.0 * kPi);
  }
  j.limits = {lo, hi};
  return j;
}

}  // namespace artigen
