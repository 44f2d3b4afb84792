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
#include <cmath>
#include <string>

namespace artigen {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Axis-aligned box. Canonical-space boxes live inside [-0.5, 0.5]^3.
struct Aabb {
  Vec3 min{0.0, 0.0, 0.0};
  Vec3 max{0.0, 0.0, 0.0};

  bool operator==(const Aabb&) const = default;

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double volume() const {
    const Vec3 e = extent();
    return e[0] * e[1] * e[2];
  }
  bool contains(const Vec3& p) const {
    for (int a = 0; a < 3; ++a) {
      if (p[a] < min[a] || p[a] > max[a]) return false;
    }
    return true;
  }
};

inline constexpr double kCanonHalf = 0.5;
inline constexpr double kPi = 3.14159265358979323846;

// Returns x rounded to 9 significant digits, i.e. the value that survives
// a round trip through the canonical text formatting used by every writer.
double canonical_real(double x);

// "%.9g" rendering with negative zero folded to "0".
std::string format_real(double x);

}  // namespace artigen
