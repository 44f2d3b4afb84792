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

#include "artigen/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "artigen/error.hpp"
#include "artigen/metrics.hpp"

namespace artigen::oracles {

namespace {

std::vector<double> brute_nearest(std::span<const Vec3> from, std::span<const Vec3> to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const Vec3& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& b : to) best = std::min(best, norm(a - b));
    out.push_back(best);
  }
  return out;
}

void check_clouds(std::span<const Vec3> p, std::span<const Vec3> q) {
  if (p.empty() || q.empty()) throw Error(Errc::kEmptyCloud, "point cloud is empty");
}

}  // namespace

double brute_chamfer(std::span<const Vec3> p, std::span<const Vec3> q) {
  check_clouds(p, q);
  const auto dp = brute_nearest(p, q);
  const auto dq = brute_nearest(q, p);
  double sp = 0.0, sq = 0.0;
  for (double d : dp) sp += d;
  for (double d : dq) sq += d;
  return 100.0 * 0.5 * (sp / static_cast<double>(p.size()) + sq / static_cast<double>(q.size()));
}

double brute_f1(std::span<const Vec3> p, std::span<const Vec3> q, double tau) {
  check_clouds(p, q);
  const auto dp = brute_nearest(p, q);
  const auto dq = brute_nearest(q, p);
  const double precision =
      100.0 * static_cast<double>(std::count_if(dp.begin(), dp.end(), [&](double d) { return d < tau; })) /
      static_cast<double>(p.size());
  const double recall =
      100.0 * static_cast<double>(std::count_if(dq.begin(), dq.end(), [&](double d) { return d < tau; })) /
      static_cast<double>(q.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double permutation_bbox_iou(std::span<const Aabb> pred, std::span<const Aabb> gt) {
  if (pred.empty() && gt.empty()) return 100.0;
  if (pred.empty() || gt.empty()) return 0.0;
  const bool swap = pred.size() > gt.size();
  const std::span<const Aabb> small = swap ? gt : pred;
  const std::span<const Aabb> large = swap ? pred : gt;
  std::vector<int> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) total += box_iou(small[i], large[perm[i]]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 100.0 * best / static_cast<double>(large.size());
}

double grid_pivot_error(const Joint& pred, const Joint& gt, double s_range) {
  if (pred.type != gt.type) throw Error(Errc::kTypeMismatch, "joint types differ");
  if (gt.type != JointType::kRevolute && gt.type != JointType::kContinuous) {
    throw Error(Errc::kNotApplicable, "pivot is defined for rotational joints only");
  }
  auto dist = [&](double s) { return norm(pred.origin - (gt.origin + s * gt.axis)); };
  constexpr int kPoints = 2001;
  double lo = -s_range, hi = s_range;
  double best_s = 0.0;
  double best = dist(0.0);
  for (int level = 0; level < 8; ++level) {
    const double step = (hi - lo) / (kPoints - 1);
    for (int i = 0; i < kPoints; ++i) {
      const double s = lo + step * i;
      const double d = dist(s);
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    lo = best_s - 2.0 * step;
    hi = best_s + 2.0 * step;
  }
  return best;
}

GradCheckReport gradient_check(diffusion::Denoiser& model,
                               std::span<const diffusion::TrainingExample> data,
                               std::uint64_t seed, int probes, double h, double floor) {
  std::vector<const diffusion::TrainingExample*> batch;
  for (const auto& ex : data) batch.push_back(&ex);
  auto loss = [&](std::span<double> grad) {
    std::mt19937_64 rng(seed);
    return diffusion::batch_loss(model, batch, rng, grad).total;
  };

  diffusion::AlignedBuffer analytic(model.param_count(), 0.0);
  loss(analytic);

  const auto& layout = model.layout();
  std::mt19937_64 pick(seed ^ 0x9e3779b97f4a7c15ULL);
  std::span<double> params = model.params();
  GradCheckReport report;
  for (int i = 0; i < probes; ++i) {
    const auto& tensor = layout[std::uniform_int_distribution<std::size_t>(0, layout.size() - 1)(pick)];
    const std::size_t idx =
        tensor.offset + std::uniform_int_distribution<std::size_t>(0, tensor.size() - 1)(pick);
    const double saved = params[idx];
    params[idx] = saved + h;
    const double up = loss({});
    params[idx] = saved - h;
    const double down = loss({});
    params[idx] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[idx];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
    ++report.probes;
    if (rel >= report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_param = tensor.name + "[" + std::to_string(idx - tensor.offset) + "]";
      report.worst_analytic = a;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace artigen::oracles
