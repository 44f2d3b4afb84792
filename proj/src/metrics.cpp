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

#include "artigen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artigen/error.hpp"

namespace artigen {

namespace {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Uniform bucket grid over a point set. Queries expand Chebyshev rings of
// cells until no unvisited cell can hold a closer point.
class PointGrid {
 public:
  explicit PointGrid(std::span<const Vec3> pts) : pts_(pts) {
    lo_ = pts[0];
    Vec3 hi = pts[0];
    for (const Vec3& p : pts) {
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    const double span = std::max({hi[0] - lo_[0], hi[1] - lo_[1], hi[2] - lo_[2], 1e-12});
    const double cells_per_axis = std::max(1.0, std::cbrt(pts.size() / 2.0));
    cell_ = span / cells_per_axis;
    for (int a = 0; a < 3; ++a) {
      dims_[a] = std::max(1, static_cast<int>(std::floor((hi[a] - lo_[a]) / cell_)) + 1);
    }
    std::vector<int> counts(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2] + 1, 0);
    std::vector<std::size_t> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = flat(cell_coords(pts[i]));
      ++counts[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    start_ = counts;
    order_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) order_[counts[cell_of[i]]++] = static_cast<int>(i);
  }

  // Starting from the clamped cell keeps the ring bound valid for queries
  // outside the grid: no cell lies beyond an edge the query was clamped to.
  double nearest(const Vec3& q) const {
    const std::array<int, 3> c = cell_coords(q);
    double best = std::numeric_limits<double>::infinity();
    int max_ring = 0;
    for (int a = 0; a < 3; ++a) max_ring = std::max({max_ring, c[a], dims_[a] - 1 - c[a]});
    for (int ring = 0; ring <= max_ring; ++ring) {
      visit_ring(c, ring, q, best);
      if (best <= ring * cell_) break;
    }
    return best;
  }

 private:
  std::array<int, 3> cell_coords(const Vec3& p) const {
    std::array<int, 3> c;
    for (int a = 0; a < 3; ++a) {
      const double v = std::floor((p[a] - lo_[a]) / cell_);
      c[a] = static_cast<int>(std::clamp(v, 0.0, static_cast<double>(dims_[a] - 1)));
    }
    return c;
  }
  std::size_t flat(const std::array<int, 3>& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(dims_[0]) * (c[1] + static_cast<std::size_t>(dims_[1]) * c[2]);
  }

  void visit_cell(int x, int y, int z, const Vec3& q, double& best) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) return;
    const std::size_t f = flat({x, y, z});
    for (int k = start_[f]; k < start_[f + 1]; ++k) {
      best = std::min(best, distance(q, pts_[order_[k]]));
    }
  }

  void visit_ring(const std::array<int, 3>& c, int ring, const Vec3& q, double& best) const {
    for (int dz = -ring; dz <= ring; ++dz) {
      for (int dy = -ring; dy <= ring; ++dy) {
        const bool edge = std::abs(dz) == ring || std::abs(dy) == ring;
        const int step = edge || ring == 0 ? 1 : 2 * ring;
        for (int dx = -ring; dx <= ring; dx += step) {
          visit_cell(c[0] + dx, c[1] + dy, c[2] + dz, q, best);
        }
      }
    }
  }

  std::span<const Vec3> pts_;
  Vec3 lo_;
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<int> start_;
  std::vector<int> order_;
};

void require_nonempty(std::span<const Vec3> p, std::span<const Vec3> q) {
  if (p.empty() || q.empty()) throw Error(Errc::kEmptyCloud, "point cloud is empty");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<std::vector<bool>> box_masks(std::span<const Aabb> boxes, const VoxelGrid& g) {
  const int r = g.resolution();
  std::vector<std::vector<bool>> masks(boxes.size(), std::vector<bool>(g.size(), false));
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        const Vec3 c = g.center(i, j, k);
        for (std::size_t b = 0; b < boxes.size(); ++b) {
          if (boxes[b].contains(c)) masks[b][g.index(i, j, k)] = true;
        }
      }
    }
  }
  return masks;
}

}  // namespace

std::vector<std::optional<double>> report_values(const MetricReport& r) {
  return {r.cd_pct, r.f1_010, r.f1_005, r.voxel_recall, r.voxel_iou,
          r.bbox_iou, r.joint_axis_err, r.joint_pivot_err, r.scale_mae};
}

std::vector<double> nearest_distances(std::span<const Vec3> queries, std::span<const Vec3> cloud) {
  require_nonempty(queries, cloud);
  const PointGrid grid(cloud);
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = grid.nearest(queries[i]);
  return out;
}

double chamfer(std::span<const Vec3> p, std::span<const Vec3> q) {
  require_nonempty(p, q);
  return 100.0 * 0.5 * (mean(nearest_distances(p, q)) + mean(nearest_distances(q, p)));
}

double f1_at(std::span<const Vec3> p, std::span<const Vec3> q, double tau) {
  require_nonempty(p, q);
  if (!(tau > 0.0)) throw Error(Errc::kShapeMismatch, "threshold must be positive");
  auto within = [tau](const std::vector<double>& d) {
    std::size_t n = 0;
    for (double x : d) n += x < tau ? 1 : 0;
    return 100.0 * static_cast<double>(n) / static_cast<double>(d.size());
  };
  const double precision = within(nearest_distances(p, q));
  const double recall = within(nearest_distances(q, p));
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double box_iou(const Aabb& a, const Aabb& b) {
  double inter = 1.0;
  for (int k = 0; k < 3; ++k) {
    inter *= std::max(0.0, std::min(a.max[k], b.max[k]) - std::max(a.min[k], b.min[k]));
  }
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return a == b ? 1.0 : 0.0;
  return inter / uni;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score) {
  const int rows = static_cast<int>(score.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(score[0].size());
  const int n = std::max(rows, cols);
  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  if (n == 0) return match;

  // Square min-cost Hungarian method with potentials; padded cells cost 0.
  auto cost = [&](int i, int j) {
    return (i < rows && j < cols) ? -score[i][j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < rows && j - 1 < cols) match[i] = j - 1;
  }
  return match;
}

double bbox_iou_set(std::span<const Aabb> pred, std::span<const Aabb> gt) {
  if (pred.empty() && gt.empty()) return 100.0;
  if (pred.empty() || gt.empty()) return 0.0;
  std::vector<std::vector<double>> iou(pred.size(), std::vector<double>(gt.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) iou[i][j] = box_iou(pred[i], gt[j]);
  }
  const auto match = max_weight_assignment(iou);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (match[i] >= 0) total += iou[i][match[i]];
  }
  return 100.0 * total / static_cast<double>(std::max(pred.size(), gt.size()));
}

VoxelPlanScores voxel_plan_metrics(std::span<const Aabb> pred_boxes, const VoxelGrid& gt) {
  const std::size_t occupied = gt.occupied();
  if (occupied == 0) throw Error(Errc::kEmptyGrid, "ground-truth grid is empty");
  VoxelPlanScores out;
  if (pred_boxes.empty()) return out;

  const auto masks = box_masks(pred_boxes, gt);
  const auto labels = gt.labels();
  std::size_t covered = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == 0) continue;
    for (const auto& m : masks) {
      if (m[v]) {
        ++covered;
        break;
      }
    }
  }
  out.recall = 100.0 * static_cast<double>(covered) / static_cast<double>(occupied);

  std::vector<int> parts;
  for (int l = 1; l <= gt.max_label(); ++l) {
    if (gt.count(static_cast<std::uint8_t>(l)) > 0) parts.push_back(l);
  }
  std::vector<std::vector<double>> iou(pred_boxes.size(), std::vector<double>(parts.size(), 0.0));
  for (std::size_t b = 0; b < pred_boxes.size(); ++b) {
    for (std::size_t p = 0; p < parts.size(); ++p) {
      std::size_t inter = 0;
      std::size_t uni = 0;
      for (std::size_t v = 0; v < labels.size(); ++v) {
        const bool in_box = masks[b][v];
        const bool in_part = labels[v] == parts[p];
        inter += in_box && in_part;
        uni += in_box || in_part;
      }
      iou[b][p] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
  }
  const auto match = max_weight_assignment(iou);
  double total = 0.0;
  for (std::size_t b = 0; b < pred_boxes.size(); ++b) {
    if (match[b] >= 0) total += iou[b][match[b]];
  }
  out.iou = 100.0 * total / static_cast<double>(std::max(pred_boxes.size(), parts.size()));
  return out;
}

double joint_axis_error(const Joint& pred, const Joint& gt) {
  if (pred.type != gt.type) throw Error(Errc::kTypeMismatch, "joint types differ");
  if (!is_movable(gt.type)) throw Error(Errc::kNotMovable, "fixed joints have no axis");
  return std::acos(std::clamp(dot(pred.axis, gt.axis), -1.0, 1.0));
}

double joint_pivot_error(const Joint& pred, const Joint& gt) {
  if (pred.type != gt.type) throw Error(Errc::kTypeMismatch, "joint types differ");
  if (gt.type != JointType::kRevolute && gt.type != JointType::kContinuous) {
    throw Error(Errc::kNotApplicable, "pivot is defined for rotational joints only");
  }
  const Vec3 d = pred.origin - gt.origin;
  const double n2 = dot(gt.axis, gt.axis);
  const double s = n2 > 0.0 ? dot(d, gt.axis) / n2 : 0.0;
  return norm(d - s * gt.axis);
}

double scale_mae(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size() || pred.empty()) {
    throw Error(Errc::kLengthMismatch, "need equal, nonzero lengths");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - gt[i]);
  return s / static_cast<double>(pred.size());
}

MetricReport evaluate_asset(const Blueprint& pred_bp, const VoxelGrid& pred_grid,
                            const Blueprint& gt_bp, const VoxelGrid& gt_grid,
                            int surface_samples, std::uint64_t seed) {
  MetricReport r;
  if (pred_grid.occupied() > 0 && gt_grid.occupied() > 0) {
    const PointCloud p = surface_points(pred_grid, surface_samples, seed);
    const PointCloud q = surface_points(gt_grid, surface_samples, seed + 1);
    r.cd_pct = chamfer(p, q);
    r.f1_010 = f1_at(p, q, 0.1);
    r.f1_005 = f1_at(p, q, 0.05);
  }
  std::vector<Aabb> pred_boxes;
  std::vector<Aabb> gt_boxes;
  for (const Part& part : pred_bp.parts) pred_boxes.push_back(part.bbox);
  for (const Part& part : gt_bp.parts) gt_boxes.push_back(part.bbox);
  if (gt_grid.occupied() > 0) {
    const VoxelPlanScores v = voxel_plan_metrics(pred_boxes, gt_grid);
    r.voxel_recall = v.recall;
    r.voxel_iou = v.iou;
  }
  r.bbox_iou = bbox_iou_set(pred_boxes, gt_boxes);

  double axis_sum = 0.0;
  double pivot_sum = 0.0;
  int axis_n = 0;
  int pivot_n = 0;
  const std::size_t n = std::min(pred_bp.parts.size(), gt_bp.parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Joint& pj = pred_bp.parts[i].joint;
    const Joint& gj = gt_bp.parts[i].joint;
    if (pj.type != gj.type || !is_movable(gj.type)) continue;
    axis_sum += joint_axis_error(pj, gj);
    ++axis_n;
    if (gj.type == JointType::kRevolute || gj.type == JointType::kContinuous) {
      pivot_sum += joint_pivot_error(pj, gj);
      ++pivot_n;
    }
  }
  if (axis_n > 0) r.joint_axis_err = axis_sum / axis_n;
  if (pivot_n > 0) r.joint_pivot_err = pivot_sum / pivot_n;

  const double pred_cm = 100.0 * pred_bp.real_scale_m;
  const double gt_cm = 100.0 * gt_bp.real_scale_m;
  r.scale_mae = scale_mae(std::span<const double>(&pred_cm, 1), std::span<const double>(&gt_cm, 1));
  return r;
}

MetricReport aggregate(std::span<const MetricReport> reports) {
  MetricReport out;
  std::optional<double> MetricReport::*fields[] = {
      &MetricReport::cd_pct, &MetricReport::f1_010, &MetricReport::f1_005,
      &MetricReport::voxel_recall, &MetricReport::voxel_iou, &MetricReport::bbox_iou,
      &MetricReport::joint_axis_err, &MetricReport::joint_pivot_err, &MetricReport::scale_mae};
  for (auto field : fields) {
    double sum = 0.0;
    int n = 0;
    for (const MetricReport& r : reports) {
      if (r.*field) {
        sum += *(r.*field);
        ++n;
      }
    }
    if (n > 0) out.*field = sum / n;
  }
  return out;
}

}  // namespace artigen
