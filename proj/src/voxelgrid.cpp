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
#include <array>
#include <cstring>
#include <limits>
#include <random>

#include "artigen/error.hpp"

namespace artigen {

VoxelGrid::VoxelGrid(int resolution) : r_(resolution) {
  if (resolution < kMinResolution || resolution > kMaxResolution) {
    throw Error(Errc::kResolution, "resolution " + std::to_string(resolution) +
                                       " outside [" + std::to_string(kMinResolution) + ", " +
                                       std::to_string(kMaxResolution) + "]");
  }
  labels_.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
}

int VoxelGrid::max_label() const {
  std::uint8_t m = 0;
  for (auto l : labels_) m = std::max(m, l);
  return m;
}

std::size_t VoxelGrid::count(std::uint8_t label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::size_t VoxelGrid::occupied() const { return labels_.size() - count(0); }

VoxelGrid rasterize_boxes(std::span<const Aabb> shapes, int resolution) {
  if (shapes.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw Error(Errc::kShapeMismatch, "more than 255 parts");
  }
  VoxelGrid g(resolution);
  const int r = g.resolution();
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        const Vec3 c = g.center(i, j, k);
        for (std::size_t p = 0; p < shapes.size(); ++p) {
          if (shapes[p].contains(c)) g.set(i, j, k, static_cast<std::uint8_t>(p + 1));
        }
      }
    }
  }
  return g;
}

VoxelGrid rasterize_parts(const Blueprint& bp, std::span<const Aabb> shapes, int resolution) {
  if (shapes.size() != bp.parts.size()) {
    throw Error(Errc::kShapeMismatch, "one shape per part required");
  }
  return rasterize_boxes(shapes, resolution);
}

Aabb part_bbox(const VoxelGrid& g, int label) {
  const int r = g.resolution();
  std::array<int, 3> lo{r, r, r};
  std::array<int, 3> hi{-1, -1, -1};
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (g.at(i, j, k) != label) continue;
        const std::array<int, 3> v{i, j, k};
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], v[a]);
          hi[a] = std::max(hi[a], v[a]);
        }
      }
    }
  }
  if (hi[0] < 0) throw Error(Errc::kEmptyPart, "label " + std::to_string(label) + " is empty");
  Aabb box;
  for (int a = 0; a < 3; ++a) {
    box.min[a] = static_cast<double>(lo[a]) / r - kCanonHalf;
    box.max[a] = static_cast<double>(hi[a] + 1) / r - kCanonHalf;
  }
  return box;
}

namespace {

struct Face {
  std::array<int, 3> voxel;
  int axis;  // normal axis
  int side;  // 0 = low face, 1 = high face
};

}  // namespace

PointCloud surface_points(const VoxelGrid& g, int n, std::uint64_t seed) {
  if (g.occupied() == 0) throw Error(Errc::kEmptyGrid, "no occupied voxels");
  if (n < 1) throw Error(Errc::kShapeMismatch, "point count must be positive");
  const int r = g.resolution();
  auto filled = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < r && j < r && k < r && g.at(i, j, k) != 0;
  };

  // All faces have equal area, so uniform-by-area is uniform over the face list.
  std::vector<Face> faces;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (!filled(i, j, k)) continue;
        for (int a = 0; a < 3; ++a) {
          for (int s = 0; s < 2; ++s) {
            std::array<int, 3> nb{i, j, k};
            nb[a] += s == 0 ? -1 : 1;
            if (!filled(nb[0], nb[1], nb[2])) faces.push_back({{i, j, k}, a, s});
          }
        }
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = g.voxel_size();
  PointCloud out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const Face& f = faces[rng() % faces.size()];
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
      const double lo = f.voxel[a] * h - kCanonHalf;
      p[a] = a == f.axis ? lo + f.side * h : lo + unit(rng) * h;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> occupancy_to_field(const VoxelGrid& g) {
  std::vector<double> field(g.size());
  const auto labels = g.labels();
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = labels[i] != 0 ? 1.0 : -1.0;
  return field;
}

VoxelGrid field_to_occupancy(std::span<const double> field, int resolution, std::uint8_t label) {
  VoxelGrid g(resolution);
  if (field.size() != g.size()) throw Error(Errc::kShapeMismatch, "field size mismatch");
  auto labels = g.labels();
  for (std::size_t i = 0; i < field.size(); ++i) labels[i] = field[i] > 0.0 ? label : 0;
  return g;
}

std::vector<std::uint8_t> encode_kvox(const VoxelGrid& g) {
  std::vector<std::uint8_t> out = {'K', 'V', 'O', 'X', '1'};
  const auto r = static_cast<std::uint32_t>(g.resolution());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>((r >> (8 * b)) & 0xFF));
  const auto labels = g.labels();
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

VoxelGrid decode_kvox(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 9 || std::memcmp(bytes.data(), "KVOX1", 5) != 0) {
    throw Error(Errc::kSyntax, "missing KVOX1 header");
  }
  std::uint32_t r = 0;
  for (int b = 0; b < 4; ++b) r |= static_cast<std::uint32_t>(bytes[5 + b]) << (8 * b);
  if (r < kMinResolution || r > kMaxResolution) {
    throw Error(Errc::kSyntax, "bad resolution " + std::to_string(r));
  }
  VoxelGrid g(static_cast<int>(r));
  if (bytes.size() != 9 + g.size()) throw Error(Errc::kSyntax, "label payload has wrong length");
  std::copy(bytes.begin() + 9, bytes.end(), g.labels().begin());
  return g;
}

}  // namespace artigen
