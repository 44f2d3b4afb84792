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

#include "artigen/blueprint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "artigen/error.hpp"
#include "json.hpp"

namespace artigen {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kJointNames = {
    "fixed", "revolute", "continuous", "prismatic"};
constexpr std::array<std::string_view, 11> kMaterialNames = {
    "metal", "wood", "plastic", "glass", "fabric", "ceramic",
    "rubber", "stone", "paper", "leather", "other"};
constexpr std::array<std::string_view, 7> kAffordanceNames = {
    "pushable", "pullable", "graspable", "rotatable",
    "pressable", "slidable", "openable"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names,
                           std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(Errc::kSchema, where + ": " + what);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(where, "unknown key '" + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing '") + key + "'");
  return *it;
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) schema_error(where, "expected string");
  return v.get<std::string>();
}

double get_real(const json& v, const std::string& where) {
  if (!v.is_number()) schema_error(where, "expected number");
  return v.get<double>();
}

Vec3 get_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) schema_error(where, "expected [x, y, z]");
  return {get_real(v[0], where), get_real(v[1], where), get_real(v[2], where)};
}

std::vector<std::string> get_string_list(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where, "expected array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) out.push_back(get_string(item, where));
  return out;
}

Joint parse_joint(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected object");
  check_keys(j, {"type", "origin", "axis", "limits"}, where);
  Joint joint;
  const std::string type = get_string(require(j, "type", where), where + ".type");
  auto parsed = parse_joint_type(type);
  if (!parsed) throw Error(Errc::kVocab, where + ".type: unknown joint type '" + type + "'");
  joint.type = *parsed;
  if (j.contains("origin")) joint.origin = get_vec3(j["origin"], where + ".origin");
  if (j.contains("axis")) joint.axis = get_vec3(j["axis"], where + ".axis");
  if (j.contains("limits")) {
    const json& l = j["limits"];
    if (!l.is_array() || l.size() != 2) schema_error(where + ".limits", "expected [lower, upper]");
    joint.limits = {get_real(l[0], where + ".limits"), get_real(l[1], where + ".limits")};
  }
  return joint;
}

Part parse_part(const json& p, const std::string& where) {
  if (!p.is_object()) schema_error(where, "expected object");
  check_keys(p, {"part_id", "parent_id", "label", "bbox", "material", "mass_kg",
                 "function", "states", "affordances", "joint"},
             where);
  Part part;
  part.part_id = get_string(require(p, "part_id", where), where + ".part_id");
  if (auto it = p.find("parent_id"); it != p.end() && !it->is_null()) {
    part.parent_id = get_string(*it, where + ".parent_id");
  }
  part.label = get_string(require(p, "label", where), where + ".label");

  const json& bbox = require(p, "bbox", where);
  if (!bbox.is_object()) schema_error(where + ".bbox", "expected object");
  check_keys(bbox, {"min", "max"}, where + ".bbox");
  part.bbox.min = get_vec3(require(bbox, "min", where + ".bbox"), where + ".bbox.min");
  part.bbox.max = get_vec3(require(bbox, "max", where + ".bbox"), where + ".bbox.max");

  const std::string material =
      get_string(require(p, "material", where), where + ".material");
  auto m = parse_material(material);
  if (!m) throw Error(Errc::kVocab, where + ".material: unknown material '" + material + "'");
  part.material = *m;

  part.mass_kg = get_real(require(p, "mass_kg", where), where + ".mass_kg");
  if (part.mass_kg < 0.0) schema_error(where + ".mass_kg", "must be non-negative");

  if (p.contains("function")) part.function = get_string(p["function"], where + ".function");
  if (p.contains("states")) part.states = get_string_list(p["states"], where + ".states");
  if (p.contains("affordances")) {
    for (const auto& name : get_string_list(p["affordances"], where + ".affordances")) {
      auto a = parse_affordance(name);
      if (!a) throw Error(Errc::kVocab, where + ".affordances: unknown affordance '" + name + "'");
      if (std::find(part.affordances.begin(), part.affordances.end(), *a) !=
          part.affordances.end()) {
        throw Error(Errc::kVocab, where + ".affordances: duplicate '" + name + "'");
      }
      part.affordances.push_back(*a);
    }
  }
  if (p.contains("joint")) part.joint = parse_joint(p["joint"], where + ".joint");
  return part;
}

std::string quoted(const std::string& s) {
  return json(s).dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string vec_text(const Vec3& v) {
  return "[" + format_real(v[0]) + ", " + format_real(v[1]) + ", " + format_real(v[2]) + "]";
}

template <typename Range, typename Fn>
std::string list_text(const Range& items, Fn&& render) {
  std::string out = "[";
  bool first = true;
  for (const auto& item : items) {
    if (!first) out += ", ";
    out += render(item);
    first = false;
  }
  return out + "]";
}

}  // namespace

std::string_view to_string(JointType t) { return kJointNames[static_cast<int>(t)]; }
std::string_view to_string(Material m) { return kMaterialNames[static_cast<int>(m)]; }
std::string_view to_string(Affordance a) { return kAffordanceNames[static_cast<int>(a)]; }

std::optional<JointType> parse_joint_type(std::string_view s) {
  return lookup<JointType>(kJointNames, s);
}
std::optional<Material> parse_material(std::string_view s) {
  return lookup<Material>(kMaterialNames, s);
}
std::optional<Affordance> parse_affordance(std::string_view s) {
  return lookup<Affordance>(kAffordanceNames, s);
}

std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::kNoRoot: return "NO_ROOT";
    case ViolationCode::kMultiRoot: return "MULTI_ROOT";
    case ViolationCode::kCycle: return "CYCLE";
    case ViolationCode::kDanglingParent: return "DANGLING_PARENT";
    case ViolationCode::kDupId: return "DUP_ID";
    case ViolationCode::kAxisNotUnit: return "AXIS_NOT_UNIT";
    case ViolationCode::kLimitsReversed: return "LIMITS_REVERSED";
    case ViolationCode::kBboxOutOfCanon: return "BBOX_OUT_OF_CANON";
    case ViolationCode::kBboxInverted: return "BBOX_INVERTED";
    case ViolationCode::kFixedNonzero: return "FIXED_NONZERO";
  }
  return "UNKNOWN";
}

Blueprint parse_blueprint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::kSyntax, e.what());
  }
  const std::string where = "blueprint";
  if (!doc.is_object()) schema_error(where, "expected top-level object");
  check_keys(doc, {"asset_id", "category", "usage_scene", "real_scale_m", "parts"}, where);

  Blueprint bp;
  bp.asset_id = get_string(require(doc, "asset_id", where), "asset_id");
  bp.category = get_string(require(doc, "category", where), "category");
  bp.usage_scene = get_string(require(doc, "usage_scene", where), "usage_scene");
  bp.real_scale_m = get_real(require(doc, "real_scale_m", where), "real_scale_m");
  if (!(bp.real_scale_m > 0.0)) schema_error("real_scale_m", "must be positive");

  const json& parts = require(doc, "parts", where);
  if (!parts.is_array() || parts.empty()) schema_error("parts", "expected non-empty array");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    bp.parts.push_back(parse_part(parts[i], "parts[" + std::to_string(i) + "]"));
  }
  return bp;
}

int root_index(const Blueprint& bp) {
  int root = -1;
  for (std::size_t i = 0; i < bp.parts.size(); ++i) {
    if (!bp.parts[i].parent_id) {
      if (root >= 0) return -1;
      root = static_cast<int>(i);
    }
  }
  return root;
}

std::vector<int> parent_indices(const Blueprint& bp) {
  std::map<std::string, int> first_index;
  for (std::size_t i = 0; i < bp.parts.size(); ++i) {
    first_index.emplace(bp.parts[i].part_id, static_cast<int>(i));
  }
  std::vector<int> parents(bp.parts.size(), -1);
  for (std::size_t i = 0; i < bp.parts.size(); ++i) {
    const auto& pid = bp.parts[i].parent_id;
    if (!pid) continue;
    if (auto it = first_index.find(*pid); it != first_index.end()) parents[i] = it->second;
  }
  return parents;
}

std::vector<Violation> validate_blueprint(const Blueprint& bp) {
  std::vector<Violation> out;
  auto add = [&out](ViolationCode code, int index, std::string msg) {
    out.push_back({code, index, std::move(msg)});
  };
  const int n = static_cast<int>(bp.parts.size());

  // Tree structure.
  std::set<std::string> seen;
  std::set<std::string> ids;
  for (int i = 0; i < n; ++i) {
    const auto& id = bp.parts[i].part_id;
    ids.insert(id);
    if (!seen.insert(id).second) add(ViolationCode::kDupId, i, "duplicate part_id '" + id + "'");
  }
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& pid = bp.parts[i].parent_id;
    if (!pid) {
      ++roots;
    } else if (!ids.count(*pid)) {
      add(ViolationCode::kDanglingParent, i, "parent '" + *pid + "' does not exist");
    }
  }
  if (roots == 0) add(ViolationCode::kNoRoot, -1, "no part without a parent");
  if (roots > 1) add(ViolationCode::kMultiRoot, -1, std::to_string(roots) + " root parts");

  const std::vector<int> parents = parent_indices(bp);
  // A part is on a cycle iff following parents from it returns to it.
  for (int i = 0; i < n; ++i) {
    int cur = parents[i];
    for (int steps = 0; cur >= 0 && steps < n; ++steps) {
      if (cur == i) {
        add(ViolationCode::kCycle, i, "part '" + bp.parts[i].part_id + "' is its own ancestor");
        break;
      }
      cur = parents[cur];
    }
  }

  for (int i = 0; i < n; ++i) {
    const Part& p = bp.parts[i];
    bool inverted = false;
    bool outside = false;
    for (int a = 0; a < 3; ++a) {
      if (p.bbox.min[a] > p.bbox.max[a]) inverted = true;
      for (double c : {p.bbox.min[a], p.bbox.max[a]}) {
        if (c < -kCanonHalf - kCanonTolerance || c > kCanonHalf + kCanonTolerance) outside = true;
      }
    }
    if (inverted) add(ViolationCode::kBboxInverted, i, "bbox min exceeds max");
    if (outside) add(ViolationCode::kBboxOutOfCanon, i, "bbox leaves [-0.5, 0.5]^3");

    const Joint& j = p.joint;
    if (is_movable(j.type) && std::abs(norm(j.axis) - 1.0) > kAxisUnitTolerance) {
      add(ViolationCode::kAxisNotUnit, i, "axis norm " + format_real(norm(j.axis)));
    }
    if (j.type == JointType::kRevolute || j.type == JointType::kPrismatic) {
      const auto [lo, hi] = j.limits;
      if (lo > hi) add(ViolationCode::kLimitsReversed, i, "lower limit exceeds upper");
      if (j.type == JointType::kRevolute &&
          (lo < -2.0 * kPi || hi > 2.0 * kPi)) {
        add(ViolationCode::kLimitsReversed, i, "revolute limits outside [-2pi, 2pi]");
      }
    }
    const bool zero_limits = j.limits.first == 0.0 && j.limits.second == 0.0;
    if (j.type == JointType::kFixed &&
        (!zero_limits || j.origin != Vec3{0, 0, 0} || j.axis != Vec3{0, 0, 0})) {
      add(ViolationCode::kFixedNonzero, i, "fixed joint carries nonzero parameters");
    }
    if (j.type == JointType::kContinuous && !zero_limits) {
      add(ViolationCode::kFixedNonzero, i, "continuous joint carries nonzero limits");
    }
  }
  return out;
}

std::string serialize_blueprint(const Blueprint& bp) {
  const auto violations = validate_blueprint(bp);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) {
      if (!msg.empty()) msg += ", ";
      msg += std::string(to_string(v.code));
    }
    throw Error(Errc::kInvalid, msg);
  }

  std::ostringstream os;
  os << "{\n";
  os << "  \"asset_id\": " << quoted(bp.asset_id) << ",\n";
  os << "  \"category\": " << quoted(bp.category) << ",\n";
  os << "  \"usage_scene\": " << quoted(bp.usage_scene) << ",\n";
  os << "  \"real_scale_m\": " << format_real(bp.real_scale_m) << ",\n";
  os << "  \"parts\": [\n";
  for (std::size_t i = 0; i < bp.parts.size(); ++i) {
    const Part& p = bp.parts[i];
    os << "    {\n";
    os << "      \"part_id\": " << quoted(p.part_id) << ",\n";
    os << "      \"parent_id\": " << (p.parent_id ? quoted(*p.parent_id) : "null") << ",\n";
    os << "      \"label\": " << quoted(p.label) << ",\n";
    os << "      \"bbox\": {\n";
    os << "        \"min\": " << vec_text(p.bbox.min) << ",\n";
    os << "        \"max\": " << vec_text(p.bbox.max) << "\n";
    os << "      },\n";
    os << "      \"material\": \"" << to_string(p.material) << "\",\n";
    os << "      \"mass_kg\": " << format_real(p.mass_kg) << ",\n";
    os << "      \"function\": " << quoted(p.function) << ",\n";
    os << "      \"states\": " << list_text(p.states, quoted) << ",\n";
    os << "      \"affordances\": "
       << list_text(p.affordances,
                    [](Affordance a) { return "\"" + std::string(to_string(a)) + "\""; })
       << ",\n";
    os << "      \"joint\": {\n";
    os << "        \"type\": \"" << to_string(p.joint.type) << "\",\n";
    os << "        \"origin\": " << vec_text(p.joint.origin) << ",\n";
    os << "        \"axis\": " << vec_text(p.joint.axis) << ",\n";
    os << "        \"limits\": [" << format_real(p.joint.limits.first) << ", "
       << format_real(p.joint.limits.second) << "]\n";
    os << "      }\n";
    os << "    }" << (i + 1 < bp.parts.size() ? "," : "") << "\n";
  }
  os << "  ]\n";
  os << "}\n";
  return os.str();
}

}  // namespace artigen
