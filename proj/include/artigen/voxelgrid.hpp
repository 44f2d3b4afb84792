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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/geometry.hpp"

namespace artigen {

inline constexpr int kDefaultResolution = 16;
inline constexpr int kMinResolution = 2;
inline constexpr int kMaxResolution = 256;

// R^3 labeled occupancy grid over [-0.5, 0.5]^3, x-fastest storage.
// Label 0 is empty; label p >= 1 refers to Blueprint::parts[p - 1].
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(int resolution);  // throws Error(kResolution)

  int resolution() const { return r_; }
  std::size_t size() const { return labels_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(r_) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(r_) * k);
  }
  std::uint8_t at(int i, int j, int k) const { return labels_[index(i, j, k)]; }
  void set(int i, int j, int k, std::uint8_t label) { labels_[index(i, j, k)] = label; }

  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<std::uint8_t> labels() { return labels_; }

  double voxel_size() const { return 1.0 / r_; }
  Vec3 center(int i, int j, int k) const {
    return {(i + 0.5) / r_ - kCanonHalf, (j + 0.5) / r_ - kCanonHalf, (k + 0.5) / r_ - kCanonHalf};
  }

  int max_label() const;
  std::size_t count(std::uint8_t label) const;
  std::size_t occupied() const;

  bool operator==(const VoxelGrid&) const = default;

 private:
  int r_ = 0;
  std::vector<std::uint8_t> labels_;
};

using PointCloud = std::vector<Vec3>;

// Voxel labeled p + 1 iff its center lies inside shapes[p]; later shapes win.
VoxelGrid rasterize_parts(const Blueprint& bp, std::span<const Aabb> shapes, int resolution);
VoxelGrid rasterize_boxes(std::span<const Aabb> shapes, int resolution);

// Tightest box over the cubes labeled `label`. Throws Error(kEmptyPart).
Aabb part_bbox(const VoxelGrid& g, int label);

// Uniform samples on exposed faces of occupied voxels. Throws Error(kEmptyGrid).
PointCloud surface_points(const VoxelGrid& g, int n, std::uint64_t seed);

// Occupied -> +1, empty -> -1.
std::vector<double> occupancy_to_field(const VoxelGrid& g);

// Occupied where field > 0; every occupied voxel gets `label`.
VoxelGrid field_to_occupancy(std::span<const double> field, int resolution,
                             std::uint8_t label = 1);

// "KVOX1" | u32 R (little endian) | R^3 label bytes, x-fastest.
std::vector<std::uint8_t> encode_kvox(const VoxelGrid& g);
VoxelGrid decode_kvox(std::span<const std::uint8_t> bytes);  // throws Error(kSyntax)

}  // namespace artigen
