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

#include "artigen/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "artigen/boxcodec.hpp"
#include "artigen/diffusion/checkpoint.hpp"
#include "artigen/diffusion/flow.hpp"
#include "artigen/error.hpp"
#include "artigen/metrics.hpp"
#include "artigen/oracles.hpp"
#include "artigen/planner.hpp"
#include "artigen/synthgen.hpp"
#include "artigen/urdf.hpp"

namespace artigen {

namespace {

using Check = std::function<std::string(std::uint64_t)>;  // empty string = pass

Vec3 random_point(std::mt19937_64& rng, double lo = -0.5, double hi = 0.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

Aabb random_box(std::mt19937_64& rng) {
  const Vec3 a = random_point(rng);
  const Vec3 b = random_point(rng);
  Aabb box;
  for (int k = 0; k < 3; ++k) {
    box.min[k] = std::min(a[k], b[k]);
    box.max[k] = std::max(a[k], b[k]);
  }
  return box;
}

std::vector<AssetSample> one_per_family(std::uint64_t seed) {
  std::vector<AssetSample> out;
  for (Family f : kAllFamilies) out.push_back(generate_asset(f, seed, kDefaultResolution));
  return out;
}

std::string codec_bound(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Aabb b = random_box(rng);
    const Aabb d = dequantize_box(quantize_box(b));
    for (int k = 0; k < 3; ++k) {
      worst = std::max({worst, std::abs(d.min[k] - b.min[k]), std::abs(d.max[k] - b.max[k])});
    }
  }
  if (worst > 1.0 / 128.0) return "max error " + format_real(worst);
  return {};
}

std::string codec_fuzz(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::uint8_t> bytes(rng() % 24);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng() % 70);
    try {
      decode_stream(from_bytes(bytes));
    } catch (const Error& e) {
      if (e.code() != Errc::kMalformed && e.code() != Errc::kInverted) {
        return std::string("unexpected error ") + e.what();
      }
    }
  }
  return {};
}

std::string blueprint_roundtrip(std::uint64_t seed) {
  for (const AssetSample& a : one_per_family(seed)) {
    if (!validate_blueprint(a.blueprint).empty()) return a.blueprint.asset_id + " has violations";
    const std::string text = serialize_blueprint(a.blueprint);
    if (serialize_blueprint(parse_blueprint(text)) != text) return a.blueprint.asset_id + " drifts";
  }
  return {};
}

std::string validator_codes(std::uint64_t seed) {
  const Blueprint base = generate_asset(Family::kCabinetDoor, seed, kDefaultResolution).blueprint;
  auto expect = [&](ViolationCode code, const std::function<void(Blueprint&)>& mutate) {
    Blueprint bp = base;
    mutate(bp);
    for (const Violation& v : validate_blueprint(bp)) {
      if (v.code == code) return true;
    }
    return false;
  };
  const std::pair<ViolationCode, std::function<void(Blueprint&)>> cases[] = {
      {ViolationCode::kNoRoot, [](Blueprint& b) { b.parts[0].parent_id = b.parts[1].part_id; }},
      {ViolationCode::kMultiRoot, [](Blueprint& b) { b.parts[1].parent_id.reset(); b.parts[1].joint = {}; }},
      {ViolationCode::kCycle,
       [](Blueprint& b) {
         Part extra = b.parts[1];
         extra.part_id = "loop_a";
         extra.parent_id = "loop_b";
         Part other = extra;
         other.part_id = "loop_b";
         other.parent_id = "loop_a";
         b.parts.push_back(extra);
         b.parts.push_back(other);
       }},
      {ViolationCode::kDanglingParent, [](Blueprint& b) { b.parts[1].parent_id = "missing"; }},
      {ViolationCode::kDupId, [](Blueprint& b) { b.parts.push_back(b.parts[1]); }},
      {ViolationCode::kAxisNotUnit, [](Blueprint& b) { b.parts[1].joint.axis = {0.0, 0.0, 2.0}; }},
      {ViolationCode::kLimitsReversed,
       [](Blueprint& b) { b.parts[1].joint.limits = {1.0, 0.0}; }},
      {ViolationCode::kBboxOutOfCanon, [](Blueprint& b) { b.parts[0].bbox.max[0] = 0.75; }},
      {ViolationCode::kBboxInverted,
       [](Blueprint& b) { std::swap(b.parts[0].bbox.min[2], b.parts[0].bbox.max[2]); }},
      {ViolationCode::kFixedNonzero, [](Blueprint& b) { b.parts[0].joint.axis = {1.0, 0.0, 0.0}; }},
  };
  for (const auto& [code, mutate] : cases) {
    if (!expect(code, mutate)) return std::string(to_string(code)) + " not triggered";
  }
  return {};
}

std::string voxel_roundtrip(std::uint64_t seed) {
  for (const AssetSample& a : one_per_family(seed)) {
    if (decode_kvox(encode_kvox(a.grid)) != a.grid) return "kvox mismatch";
    for (std::size_t p = 0; p < a.blueprint.parts.size(); ++p) {
      if (part_bbox(a.grid, static_cast<int>(p) + 1) != a.blueprint.parts[p].bbox) {
        return a.blueprint.parts[p].part_id + " bbox differs from its voxels";
      }
    }
  }
  return {};
}

std::string planner_types(std::uint64_t seed) {
  for (const AssetSample& a : one_per_family(seed)) {
    const Plan plan = plan_blueprint(a.grid);
    const Plan truth = plan_from_blueprint(a.blueprint);
    if (plan.boxes != truth.boxes) return std::string(to_string(a.family)) + " boxes differ";
    if (plan.joint_types != truth.joint_types) return std::string(to_string(a.family)) + " joint types differ";
  }
  return {};
}

std::string kinevoxel_roundtrip(std::uint64_t seed) {
  for (const AssetSample& a : one_per_family(seed)) {
    for (const Part& p : a.blueprint.parts) {
      const Joint back = unpack(pack(p.joint));
      if (back.type != p.joint.type) return p.part_id + " type changed";
      for (int k = 0; k < 3; ++k) {
        if (std::abs(back.origin[k] - p.joint.origin[k]) > 1e-12 ||
            std::abs(back.axis[k] - p.joint.axis[k]) > 1e-12) {
          return p.part_id + " origin/axis drift";
        }
      }
      if (std::abs(back.limits.first - p.joint.limits.first) > 1e-12 ||
          std::abs(back.limits.second - p.joint.limits.second) > 1e-12) {
        return p.part_id + " limits drift";
      }
    }
  }
  return {};
}

std::string metric_oracles(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 10; ++i) {
    PointCloud p(50 + rng() % 100), q(50 + rng() % 100);
    for (auto& v : p) v = random_point(rng);
    for (auto& v : q) v = random_point(rng);
    if (std::abs(chamfer(p, q) - oracles::brute_chamfer(p, q)) > 1e-12) return "chamfer";
    for (double tau : {0.1, 0.05}) {
      if (std::abs(f1_at(p, q, tau) - oracles::brute_f1(p, q, tau)) > 1e-12) return "f1";
    }
  }
  for (int i = 0; i < 20; ++i) {
    std::vector<Aabb> a(1 + rng() % 5), b(1 + rng() % 5);
    for (auto& x : a) x = random_box(rng);
    for (auto& x : b) x = random_box(rng);
    if (std::abs(bbox_iou_set(a, b) - oracles::permutation_bbox_iou(a, b)) > 1e-9) return "bbox";
  }
  for (int i = 0; i < 20; ++i) {
    Joint g{.type = JointType::kRevolute, .origin = random_point(rng)};
    Vec3 axis = random_point(rng, -1.0, 1.0);
    g.axis = (1.0 / norm(axis)) * axis;
    Joint p = g;
    p.origin = random_point(rng);
    if (std::abs(joint_pivot_error(p, g) - oracles::grid_pivot_error(p, g)) > 1e-6) return "pivot";
  }
  return {};
}

std::string gradient(std::uint64_t seed) {
  diffusion::DenoiserConfig cfg;
  cfg.resolution = 8;
  cfg.patch = 2;
  cfg.d_model = 16;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.mlp_ratio = 2;
  cfg.seed = seed;
  diffusion::Denoiser model(cfg);
  model.randomize_output_layers(0.2, seed);
  const AssetSample a = generate_asset(Family::kCabinetDoor, seed, cfg.resolution);
  const std::vector<diffusion::TrainingExample> data{
      diffusion::make_example(a.blueprint, a.grid, cfg.scales)};
  const auto report = oracles::gradient_check(model, data, seed, 40, 1e-4, 1e-6);
  if (report.max_rel_error >= 1e-4) {
    return report.worst_param + " rel " + format_real(report.max_rel_error);
  }
  return {};
}

std::string sampler_identity(std::uint64_t seed) {
  diffusion::DenoiserConfig cfg;
  cfg.resolution = 8;
  cfg.patch = 4;
  cfg.d_model = 16;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  const diffusion::Denoiser model(cfg);
  const AssetSample a = generate_asset(Family::kDrawerChest, seed, cfg.resolution);
  const auto cond = diffusion::Condition::from_blueprint(a.blueprint);
  const auto noise = diffusion::sample_noise(cfg, cond, seed);
  const auto s = diffusion::sample(model, cond, 7, seed);
  if (s.field != noise.geo || s.kin != noise.kin) return "zero model moved the noise";
  const VoxelGrid expected = diffusion::label_by_boxes(field_to_occupancy(noise.geo, 8), cond.boxes);
  if (s.occupancy != expected) return "occupancy differs from thresholded noise";

  diffusion::Velocity c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  c.geo.resize(noise.geo.size());
  for (double& v : c.geo) v = normal(rng);
  c.kin.resize(noise.kin.size());
  for (auto& k : c.kin) {
    for (double& v : k) v = normal(rng);
  }
  for (int steps : {1, 3, 10, 50}) {
    const auto x = diffusion::integrate_flow([&](const diffusion::DiffusionState&) { return c; },
                                             noise, steps);
    for (std::size_t i = 0; i < c.geo.size(); ++i) {
      if (x.geo[i] != noise.geo[i] + c.geo[i]) return "constant field inexact at " + std::to_string(steps) + " steps";
    }
  }
  return {};
}

std::string export_roundtrip(std::uint64_t seed) {
  for (const AssetSample& a : one_per_family(seed)) {
    const UrdfDocument doc = to_urdf(a.blueprint, a.grid);
    if (!(parse_urdf(serialize_urdf(doc)) == doc)) return std::string(to_string(a.family)) + " reparse";
    if (doc.joints.size() + 1 != a.blueprint.parts.size()) return "joint count";
    for (std::size_t p = 0; p < a.blueprint.parts.size(); ++p) {
      const int label = static_cast<int>(p) + 1;
      VoxelGrid re(a.grid.resolution());
      for (const VoxelBox& b : greedy_merge(a.grid, label)) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
          for (int j = b.lo[1]; j < b.hi[1]; ++j) {
            for (int i = b.lo[0]; i < b.hi[0]; ++i) re.set(i, j, k, static_cast<std::uint8_t>(re.at(i, j, k) + 1));
          }
        }
      }
      for (std::size_t v = 0; v < re.size(); ++v) {
        if ((a.grid.labels()[v] == label ? 1 : 0) != re.labels()[v]) return "greedy merge coverage";
      }
    }
  }
  return {};
}

std::string checkpoint_roundtrip(std::uint64_t seed) {
  diffusion::DenoiserConfig cfg;
  cfg.resolution = 8;
  cfg.d_model = 16;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.seed = seed;
  const diffusion::Denoiser model(cfg);
  const auto bytes = diffusion::encode_checkpoint(model);
  const diffusion::Denoiser back = diffusion::decode_checkpoint(bytes);
  if (!(back.config() == model.config())) return "config";
  if (diffusion::encode_checkpoint(back) != bytes) return "bytes";
  return {};
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  const std::pair<const char*, Check> checks[] = {
      {"boxcodec.bound", codec_bound},
      {"boxcodec.fuzz", codec_fuzz},
      {"blueprint.roundtrip", blueprint_roundtrip},
      {"blueprint.validator_codes", validator_codes},
      {"voxelgrid.roundtrip", voxel_roundtrip},
      {"planner.labeled_grids", planner_types},
      {"kinevoxel.roundtrip", kinevoxel_roundtrip},
      {"metrics.oracles", metric_oracles},
      {"diffusion.gradient", gradient},
      {"diffusion.sampler_identity", sampler_identity},
      {"exporter.roundtrip", export_roundtrip},
      {"diffusion.checkpoint", checkpoint_roundtrip},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, check] : checks) {
    CheckResult r{name, false, {}};
    try {
      r.detail = check(seed);
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("threw ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace artigen
