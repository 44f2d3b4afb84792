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

#include "artigen/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "artigen/error.hpp"

namespace artigen {

namespace {

constexpr int kMinSynthResolution = 8;

constexpr std::array<std::string_view, 5> kFamilyNames = {
    "cabinet_door", "drawer_chest", "hinged_lid", "rotary_knob", "fixed_handle"};

// Half-open voxel index box [lo, hi).
struct IBox {
  std::array<int, 3> lo;
  std::array<int, 3> hi;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform_int(int lo, int hi) {  // inclusive
    if (hi <= lo) return lo;
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  template <typename T>
  T pick(std::initializer_list<T> items) {
    return *(items.begin() + uniform_int(0, static_cast<int>(items.size()) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Scales a size tuned for R = 16 to the requested resolution.
int vox(double n16, int r) { return std::max(1, static_cast<int>(std::lround(n16 * r / 16.0))); }

double canon(int i, int r) { return canonical_real(static_cast<double>(i) / r - kCanonHalf); }

Aabb to_aabb(const IBox& b, int r) {
  return {{canon(b.lo[0], r), canon(b.lo[1], r), canon(b.lo[2], r)},
          {canon(b.hi[0], r), canon(b.hi[1], r), canon(b.hi[2], r)}};
}

// Quarter turn about +z through the grid center.
IBox rotate(const IBox& b, int r) {
  return {{r - b.hi[1], b.lo[0], b.lo[2]}, {r - b.lo[1], b.hi[0], b.hi[2]}};
}
Vec3 rotate(const Vec3& v) { return {v[1] == 0.0 ? 0.0 : -v[1], v[0], v[2]}; }

struct Feature {
  IBox box;
  std::string part_id;
  std::string label;
  Material material;
  std::string function;
  std::vector<std::string> states;
  std::vector<Affordance> affordances;
  JointType type = JointType::kFixed;
  Vec3 origin{0, 0, 0};  // canonical, local frame
  Vec3 axis{0, 0, 0};
  std::pair<double, double> limits{0.0, 0.0};
};

struct Layout {
  IBox body;
  std::vector<Feature> children;
};

IBox make_body(Rng& rng, int r) {
  const int margin = r >= 16 ? vox(2, r) : 1;
  const int span = r - 2 * margin;
  const int w = std::min(rng.uniform_int(vox(8, r), vox(12, r)), span);
  const int d = std::min(rng.uniform_int(vox(6, r), vox(10, r)), span);
  const int h = std::min(rng.uniform_int(vox(8, r), vox(13, r)), r - margin - 1);
  IBox b;
  b.lo = {rng.uniform_int(margin, r - margin - w), rng.uniform_int(margin, r - margin - d),
          rng.uniform_int(1, r - margin - h)};
  b.hi = {b.lo[0] + w, b.lo[1] + d, b.lo[2] + h};
  return b;
}

double density(Material m) {
  switch (m) {
    case Material::kMetal: return 7800.0;
    case Material::kWood: return 600.0;
    case Material::kPlastic: return 950.0;
    default: return 1000.0;
  }
}

void add_doors(Layout& L, Rng& rng, int r) {
  const IBox& b = L.body;
  const int t = vox(1, r);
  const int doors = (b.hi[0] - b.lo[0]) >= 2 * vox(4, r) ? rng.uniform_int(1, 2) : 1;
  const Material mat = rng.pick({Material::kWood, Material::kMetal});
  const double zmid = 0.5 * (canon(b.lo[2], r) + canon(b.hi[2], r));
  const int xm = b.lo[0] + (b.hi[0] - b.lo[0]) / 2;
  const bool left_hinge_single = rng.uniform_int(0, 1) == 0;
  for (int i = 0; i < doors; ++i) {
    Feature f;
    const bool left = doors == 2 ? i == 0 : left_hinge_single;
    const int x_lo = doors == 2 ? (left ? b.lo[0] : xm) : b.lo[0];
    const int x_hi = doors == 2 ? (left ? xm : b.hi[0]) : b.hi[0];
    f.box = {{x_lo, b.lo[1] - t, b.lo[2]}, {x_hi, b.lo[1], b.hi[2]}};
    f.part_id = "door_" + std::to_string(i);
    f.label = "door";
    f.material = mat;
    f.function = "to cover";
    f.states = {"open", "closed"};
    f.affordances = {Affordance::kPullable, Affordance::kRotatable, Affordance::kOpenable};
    f.type = JointType::kRevolute;
    // The door swings outward (-y) about its outer vertical edge.
    f.origin = {canon(left ? x_lo : x_hi, r), canon(b.lo[1], r), zmid};
    f.axis = {0.0, 0.0, left ? -1.0 : 1.0};
    f.limits = {0.0, canonical_real(kPi / 2.0)};
    L.children.push_back(f);
  }
}

void add_drawers(Layout& L, Rng& rng, int r) {
  const IBox& b = L.body;
  const int h = b.hi[2] - b.lo[2];
  const int d = b.hi[1] - b.lo[1];
  const int min_h = vox(2, r);
  const int max_n = std::clamp((h - 1) / (min_h + 1), 1, 3);
  const int n = rng.uniform_int(1, max_n);
  const int slot = (h - 1 - n) / n;
  const int depth = rng.uniform_int(std::max(2, d / 2), std::max(2, d - 1));
  const Material mat = rng.pick({Material::kWood, Material::kPlastic, Material::kMetal});
  for (int i = 0; i < n; ++i) {
    Feature f;
    const int z_lo = b.lo[2] + 1 + i * (slot + 1);
    f.box = {{b.lo[0] + 1, b.lo[1], z_lo}, {b.hi[0] - 1, b.lo[1] + depth, z_lo + slot}};
    f.part_id = "drawer_" + std::to_string(i);
    f.label = "drawer";
    f.material = mat;
    f.function = "to store";
    f.states = {"open", "closed"};
    f.affordances = {Affordance::kPullable, Affordance::kSlidable, Affordance::kOpenable};
    f.type = JointType::kPrismatic;
    const Aabb box = to_aabb(f.box, r);
    f.origin = {canonical_real(box.center()[0]), canonical_real(box.center()[1]),
                canonical_real(box.center()[2])};
    f.axis = {0.0, -1.0, 0.0};
    f.limits = {0.0, canonical_real(0.8 * depth / r)};
    L.children.push_back(f);
  }
}

void add_lid(Layout& L, Rng& rng, int r) {
  const IBox& b = L.body;
  Feature f;
  f.box = {{b.lo[0], b.lo[1], b.hi[2]}, {b.hi[0], b.hi[1], b.hi[2] + vox(1, r)}};
  f.part_id = "lid";
  f.label = "lid";
  f.material = rng.pick({Material::kWood, Material::kPlastic});
  f.function = "to cover";
  f.states = {"open", "closed"};
  f.affordances = {Affordance::kPushable, Affordance::kRotatable, Affordance::kOpenable};
  f.type = JointType::kRevolute;
  // Hinged along the back top edge (+x); opening lifts the front upward.
  f.origin = {canon(b.hi[0], r), canonical_real(0.5 * (canon(b.lo[1], r) + canon(b.hi[1], r))),
              canon(b.hi[2], r)};
  f.axis = {0.0, 1.0, 0.0};
  f.limits = {0.0, 1.9};
  L.children.push_back(f);
}

void add_knob(Layout& L, Rng& rng, int r) {
  const IBox& b = L.body;
  const int c = vox(2, r);
  const int x_lo = rng.uniform_int(b.lo[0], b.hi[0] - c);
  const int z_lo = rng.uniform_int(b.lo[2], b.hi[2] - c);
  Feature f;
  f.box = {{x_lo, b.lo[1] - vox(1, r), z_lo}, {x_lo + c, b.lo[1], z_lo + c}};
  f.part_id = "knob";
  f.label = "knob";
  f.material = rng.pick({Material::kPlastic, Material::kMetal});
  f.function = "to adjust";
  f.states = {"off", "low", "high"};
  f.affordances = {Affordance::kGraspable, Affordance::kRotatable};
  f.type = JointType::kContinuous;
  const Aabb box = to_aabb(f.box, r);
  f.origin = {canonical_real(box.center()[0]), canonical_real(box.center()[1]),
              canonical_real(box.center()[2])};
  f.axis = {0.0, -1.0, 0.0};
  L.children.push_back(f);
}

void add_handle(Layout& L, Rng& rng, int r) {
  const IBox& b = L.body;
  const bool horizontal = rng.uniform_int(0, 1) == 0;
  const int t = vox(1, r);
  const int len = std::min(rng.uniform_int(vox(3, r), vox(5, r)),
                           std::min(b.hi[0] - b.lo[0], b.hi[2] - b.lo[2]));
  const int lx = horizontal ? len : t;
  const int lz = horizontal ? t : len;
  const int x_lo = rng.uniform_int(b.lo[0], b.hi[0] - lx);
  const int z_lo = rng.uniform_int(b.lo[2], b.hi[2] - lz);
  Feature f;
  f.box = {{x_lo, b.lo[1] - t, z_lo}, {x_lo + lx, b.lo[1], z_lo + lz}};
  f.part_id = "handle";
  f.label = "handle";
  f.material = rng.pick({Material::kMetal, Material::kPlastic});
  f.function = "to grasp";
  f.affordances = {Affordance::kGraspable, Affordance::kPullable};
  L.children.push_back(f);
}

struct FamilyInfo {
  const char* category;
  std::vector<const char*> scenes;
  std::vector<Material> body_materials;
  const char* body_function;
};

FamilyInfo family_info(Family f) {
  switch (f) {
    case Family::kCabinetDoor:
      return {"cabinet", {"kitchen", "office", "bedroom"}, {Material::kWood, Material::kMetal}, "to contain"};
    case Family::kDrawerChest:
      return {"chest of drawers", {"bedroom", "office"}, {Material::kWood, Material::kPlastic}, "to store"};
    case Family::kHingedLid:
      return {"storage chest", {"living room", "garage"}, {Material::kWood, Material::kPlastic}, "to contain"};
    case Family::kRotaryKnob:
      return {"stove", {"kitchen"}, {Material::kMetal}, "to heat"};
    case Family::kFixedHandle:
      return {"toolbox", {"garage", "workshop"}, {Material::kMetal, Material::kPlastic}, "to contain"};
  }
  return {"object", {"indoor"}, {Material::kOther}, ""};
}

}  // namespace

std::string_view to_string(Family f) { return kFamilyNames[static_cast<int>(f)]; }

std::optional<Family> parse_family(std::string_view s) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == s) return static_cast<Family>(i);
  }
  return std::nullopt;
}

AssetSample generate_asset(Family family, std::uint64_t seed, int resolution) {
  if (resolution < kMinSynthResolution || resolution > kMaxResolution) {
    throw Error(Errc::kResolution, "synthetic assets need 8 <= R <= 256, got " +
                                       std::to_string(resolution));
  }
  const int r = resolution;
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(family) * 0xD1B54A32D192ED03ULL + 1);

  Layout L;
  L.body = make_body(rng, r);
  switch (family) {
    case Family::kCabinetDoor: add_doors(L, rng, r); break;
    case Family::kDrawerChest: add_drawers(L, rng, r); break;
    case Family::kHingedLid: add_lid(L, rng, r); break;
    case Family::kRotaryKnob: add_knob(L, rng, r); break;
    case Family::kFixedHandle: add_handle(L, rng, r); break;
  }

  // Orient the asset: lids keep their axis in the y direction.
  const int turns = family == Family::kHingedLid ? 2 * rng.uniform_int(0, 1) : rng.uniform_int(0, 3);
  for (int q = 0; q < turns; ++q) {
    L.body = rotate(L.body, r);
    for (Feature& f : L.children) {
      f.box = rotate(f.box, r);
      if (is_movable(f.type)) {
        f.origin = rotate(f.origin);
        f.axis = rotate(f.axis);
      }
    }
  }

  const FamilyInfo info = family_info(family);
  Blueprint bp;
  bp.asset_id = std::string(to_string(family)) + "_s" + std::to_string(seed);
  bp.category = info.category;
  bp.usage_scene = *(info.scenes.begin() + rng.uniform_int(0, static_cast<int>(info.scenes.size()) - 1));
  bp.real_scale_m = canonical_real(std::round(rng.uniform(0.3, 1.8) * 100.0) / 100.0);

  Aabb all = to_aabb(L.body, r);
  for (const Feature& f : L.children) {
    const Aabb b = to_aabb(f.box, r);
    for (int a = 0; a < 3; ++a) {
      all.min[a] = std::min(all.min[a], b.min[a]);
      all.max[a] = std::max(all.max[a], b.max[a]);
    }
  }
  const Vec3 e = all.extent();
  const double meters_per_unit = bp.real_scale_m / std::max({e[0], e[1], e[2]});
  auto mass_of = [&](const Aabb& box, Material m) {
    const double vol = box.volume() * std::pow(meters_per_unit, 3);
    // Furniture shells are mostly hollow.
    return canonical_real(std::round(density(m) * vol * 0.2 * 1000.0) / 1000.0);
  };

  Part body;
  body.part_id = "body";
  body.label = std::string(info.category) + " body";
  body.bbox = to_aabb(L.body, r);
  body.material = *(info.body_materials.begin() +
                    rng.uniform_int(0, static_cast<int>(info.body_materials.size()) - 1));
  body.mass_kg = mass_of(body.bbox, body.material);
  body.function = info.body_function;
  bp.parts.push_back(body);

  for (const Feature& f : L.children) {
    Part p;
    p.part_id = f.part_id;
    p.parent_id = "body";
    p.label = f.label;
    p.bbox = to_aabb(f.box, r);
    p.material = f.material;
    p.mass_kg = mass_of(p.bbox, f.material);
    p.function = f.function;
    p.states = f.states;
    p.affordances = f.affordances;
    p.joint.type = f.type;
    if (is_movable(f.type)) {
      for (int a = 0; a < 3; ++a) {
        p.joint.origin[a] = canonical_real(f.origin[a]);
        p.joint.axis[a] = f.axis[a];
      }
      p.joint.limits = f.limits;
    }
    bp.parts.push_back(p);
  }

  std::vector<Aabb> shapes;
  for (const Part& p : bp.parts) shapes.push_back(p.bbox);
  AssetSample sample{bp, rasterize_parts(bp, shapes, r), family};
  return sample;
}

std::vector<AssetSample> generate_dataset(const DatasetSpec& spec, std::uint64_t seed,
                                          int resolution) {
  int total = 0;
  for (const auto& [family, count] : spec) {
    if (count < 0) throw Error(Errc::kSchema, "negative family count");
    total += count;
  }
  if (total < 1) throw Error(Errc::kSchema, "dataset needs at least one asset");
  std::vector<AssetSample> out;
  out.reserve(static_cast<std::size_t>(total));
  std::uint64_t index = 0;
  for (const auto& [family, count] : spec) {
    for (int i = 0; i < count; ++i, ++index) {
      out.push_back(generate_asset(family, seed + index, resolution));
    }
  }
  return out;
}

DatasetSpec parse_dataset_spec(std::string_view text) {
  DatasetSpec spec;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(Errc::kSchema, "expected family=count, got '" + item + "'");
    const auto family = parse_family(item.substr(0, eq));
    if (!family) throw Error(Errc::kVocab, "unknown family '" + item.substr(0, eq) + "'");
    int count = 0;
    try {
      std::size_t used = 0;
      count = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(Errc::kSchema, "bad count in '" + item + "'");
    }
    spec.emplace_back(*family, count);
  }
  return spec;
}

}  // namespace artigen
