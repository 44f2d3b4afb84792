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

#include "artigen/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "artigen/error.hpp"

namespace artigen {

namespace {

constexpr double kEps = 1e-9;

struct Contact {
  int axis = -1;
  int side = 0;  // +1: child sits on the parent's high face, -1: low face
};

// Child box resting against an outer face of the parent box.
Contact external_contact(const Aabb& child, const Aabb& parent) {
  for (int a = 0; a < 3; ++a) {
    int side = 0;
    if (std::abs(child.min[a] - parent.max[a]) < kEps) side = 1;
    if (std::abs(child.max[a] - parent.min[a]) < kEps) side = -1;
    if (side == 0) continue;
    bool overlaps = true;
    for (int b = 0; b < 3; ++b) {
      if (b == a) continue;
      if (!(child.min[b] < parent.max[b] - kEps && child.max[b] > parent.min[b] + kEps)) {
        overlaps = false;
      }
    }
    if (overlaps) return {a, side};
  }
  return {};
}

// Child box inside the parent with one face flush against a parent face.
Contact flush_inside(const Aabb& child, const Aabb& parent) {
  for (int a = 0; a < 3; ++a) {
    if (child.min[a] < parent.min[a] - kEps || child.max[a] > parent.max[a] + kEps) return {};
  }
  for (int a = 0; a < 3; ++a) {
    if (std::abs(child.min[a] - parent.min[a]) < kEps) return {a, -1};
    if (std::abs(child.max[a] - parent.max[a]) < kEps) return {a, 1};
  }
  return {};
}

JointType classify(const Aabb& child, std::size_t child_count, const Aabb& root,
                   std::size_t root_count, double voxel, const PlannerOptions& opts) {
  const Vec3 e = child.extent();
  const double lo = std::min({e[0], e[1], e[2]});
  const double hi = std::max({e[0], e[1], e[2]});
  const Contact outside = external_contact(child, root);
  if (outside.axis >= 0 && lo <= opts.thin_ratio * hi) return JointType::kRevolute;
  if (flush_inside(child, root).axis >= 0) return JointType::kPrismatic;
  if (outside.axis >= 0 &&
      static_cast<double>(child_count) <= opts.small_ratio * static_cast<double>(root_count)) {
    const int u = (outside.axis + 1) % 3;
    const int v = (outside.axis + 2) % 3;
    if (std::abs(e[u] - e[v]) <= voxel + kEps) return JointType::kContinuous;
  }
  return JointType::kFixed;
}

}  // namespace

VoxelGrid segment_parts(const VoxelGrid& g) {
  if (g.occupied() == 0) throw Error(Errc::kEmptyGrid, "nothing to segment");
  std::set<std::uint8_t> distinct;
  for (auto l : g.labels()) {
    if (l != 0) distinct.insert(l);
  }
  if (distinct.size() > 1) return g;

  const int r = g.resolution();
  std::vector<int> component(g.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::array<int, 3>> stack;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (g.at(i, j, k) == 0 || component[g.index(i, j, k)] >= 0) continue;
        const int id = static_cast<int>(sizes.size());
        sizes.push_back(0);
        stack.push_back({i, j, k});
        component[g.index(i, j, k)] = id;
        while (!stack.empty()) {
          const auto v = stack.back();
          stack.pop_back();
          ++sizes[id];
          for (int a = 0; a < 3; ++a) {
            for (int s : {-1, 1}) {
              auto nb = v;
              nb[a] += s;
              if (nb[a] < 0 || nb[a] >= r) continue;
              const std::size_t idx = g.index(nb[0], nb[1], nb[2]);
              if (g.labels()[idx] == 0 || component[idx] >= 0) continue;
              component[idx] = id;
              stack.push_back(nb);
            }
          }
        }
      }
    }
  }
  if (sizes.size() > 255) throw Error(Errc::kShapeMismatch, "more than 255 components");

  std::vector<int> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sizes[a] > sizes[b]; });
  std::vector<std::uint8_t> label_of(sizes.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    label_of[order[rank]] = static_cast<std::uint8_t>(rank + 1);
  }
  VoxelGrid out(r);
  auto labels = out.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (component[i] >= 0) labels[i] = label_of[component[i]];
  }
  return out;
}

Plan plan_blueprint(const VoxelGrid& g, const PlannerOptions& opts) {
  const VoxelGrid seg = segment_parts(g);
  std::vector<int> present;
  for (int l = 1; l <= seg.max_label(); ++l) {
    if (seg.count(static_cast<std::uint8_t>(l)) > 0) present.push_back(l);
  }

  Plan plan;
  std::vector<std::size_t> counts;
  for (int l : present) {
    plan.boxes.push_back(part_bbox(seg, l));
    counts.push_back(seg.count(static_cast<std::uint8_t>(l)));
  }
  const int n = static_cast<int>(present.size());
  int root = 0;
  for (int i = 1; i < n; ++i) {
    if (counts[i] > counts[root]) root = i;
  }
  for (int i = 0; i < n; ++i) {
    plan.parents.push_back(i == root ? -1 : root);
    plan.joint_types.push_back(i == root ? JointType::kFixed
                                         : classify(plan.boxes[i], counts[i], plan.boxes[root],
                                                    counts[root], seg.voxel_size(), opts));
  }
  return plan;
}

Plan plan_from_blueprint(const Blueprint& bp) {
  Plan plan;
  plan.parents = parent_indices(bp);
  for (const Part& p : bp.parts) {
    plan.boxes.push_back(p.bbox);
    plan.joint_types.push_back(p.joint.type);
  }
  return plan;
}

Blueprint plan_skeleton(const Plan& plan, double real_scale_m) {
  Blueprint bp;
  bp.asset_id = "planned";
  bp.category = "unknown";
  bp.usage_scene = "unknown";
  bp.real_scale_m = real_scale_m;
  for (std::size_t i = 0; i < plan.boxes.size(); ++i) {
    Part p;
    p.part_id = "part_" + std::to_string(i);
    p.label = p.part_id;
    p.bbox = plan.boxes[i];
    if (plan.parents[i] >= 0) p.parent_id = "part_" + std::to_string(plan.parents[i]);
    p.joint.type = plan.joint_types[i];
    bp.parts.push_back(p);
  }

  for (std::size_t i = 0; i < plan.boxes.size(); ++i) {
    Joint& j = bp.parts[i].joint;
    if (!is_movable(j.type) || plan.parents[i] < 0) {
      j = Joint{.type = j.type};
      if (is_movable(j.type)) j.axis = {0.0, 0.0, 1.0};
      continue;
    }
    const Aabb& child = plan.boxes[i];
    const Aabb& parent = plan.boxes[plan.parents[i]];
    Contact c = external_contact(child, parent);
    if (c.axis < 0) c = flush_inside(child, parent);
    Vec3 origin = child.center();
    Vec3 axis{0.0, 0.0, 1.0};
    if (c.axis >= 0) {
      origin[c.axis] = c.side > 0 ? (j.type == JointType::kPrismatic ? child.max[c.axis] : child.min[c.axis])
                                  : (j.type == JointType::kPrismatic ? child.min[c.axis] : child.max[c.axis]);
      axis = {0.0, 0.0, 0.0};
      axis[c.axis] = c.side > 0 ? 1.0 : -1.0;
      if (j.type == JointType::kRevolute) {
        // Hinge runs along the panel's longer in-contact-plane extent.
        const int u = (c.axis + 1) % 3;
        const int v = (c.axis + 2) % 3;
        const Vec3 e = child.extent();
        axis = {0.0, 0.0, 0.0};
        axis[e[u] >= e[v] ? u : v] = 1.0;
      }
    }
    j.origin = origin;
    j.axis = axis;
    if (j.type == JointType::kRevolute) j.limits = {0.0, canonical_real(kPi / 2.0)};
    if (j.type == JointType::kPrismatic) {
      j.limits = {0.0, canonical_real(0.8 * (c.axis >= 0 ? child.extent()[c.axis] : 0.0))};
    }
  }
  return bp;
}

}  // namespace artigen
