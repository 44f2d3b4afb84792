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

#include "artigen/urdf.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdlib>
#include <sstream>

#include "artigen/error.hpp"

namespace artigen {

namespace {

using boost::property_tree::ptree;

std::array<double, 4> material_rgba(Material m) {
  switch (m) {
    case Material::kMetal: return {0.6, 0.6, 0.65, 1.0};
    case Material::kWood: return {0.55, 0.35, 0.2, 1.0};
    case Material::kPlastic: return {0.9, 0.9, 0.9, 1.0};
    case Material::kGlass: return {0.7, 0.85, 0.9, 0.4};
    case Material::kFabric: return {0.5, 0.3, 0.5, 1.0};
    case Material::kCeramic: return {0.95, 0.95, 0.9, 1.0};
    case Material::kRubber: return {0.1, 0.1, 0.1, 1.0};
    case Material::kStone: return {0.5, 0.5, 0.5, 1.0};
    case Material::kPaper: return {0.95, 0.92, 0.85, 1.0};
    case Material::kLeather: return {0.4, 0.25, 0.15, 1.0};
    case Material::kOther: break;
  }
  return {0.7, 0.7, 0.7, 1.0};
}

Vec3 canon3(const Vec3& v) {
  return {canonical_real(v[0]), canonical_real(v[1]), canonical_real(v[2])};
}

std::string fmt3(const Vec3& v) {
  return format_real(v[0]) + " " + format_real(v[1]) + " " + format_real(v[2]);
}

// --- reading ---------------------------------------------------------------

[[noreturn]] void unsupported(const std::string& what) {
  throw Error(Errc::kUnsupportedElement, what);
}

std::vector<double> parse_numbers(const std::string& text, std::size_t n, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw Error(Errc::kXmlSyntax, "bad number in " + what);
    out.push_back(v);
  }
  if (out.size() != n) throw Error(Errc::kXmlSyntax, what + " needs " + std::to_string(n) + " numbers");
  return out;
}

std::string attr(const ptree& node, const std::string& name, const std::string& where) {
  const auto v = node.get_optional<std::string>("<xmlattr>." + name);
  if (!v) throw Error(Errc::kXmlSyntax, where + " is missing attribute '" + name + "'");
  return *v;
}

double attr_real(const ptree& node, const std::string& name, const std::string& where) {
  return parse_numbers(attr(node, name, where), 1, where + "@" + name)[0];
}

Vec3 attr_vec3(const ptree& node, const std::string& name, const std::string& where) {
  const auto v = parse_numbers(attr(node, name, where), 3, where + "@" + name);
  return {v[0], v[1], v[2]};
}

void check_children(const ptree& node, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      unsupported("element <" + key + "> inside " + where);
    }
  }
}

void check_attrs(const ptree& node, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  const auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return;
  for (const auto& [key, v] : *attrs) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      unsupported("attribute '" + key + "' on " + where);
    }
  }
}

const ptree& only_child(const ptree& node, const std::string& key, const std::string& where) {
  if (node.count(key) != 1) {
    throw Error(Errc::kXmlSyntax, where + " needs exactly one <" + key + ">");
  }
  return node.get_child(key);
}

Vec3 read_origin(const ptree& node, const std::string& where) {
  const ptree& o = only_child(node, "origin", where);
  check_attrs(o, {"xyz", "rpy"}, where + "/origin");
  if (o.get_optional<std::string>("<xmlattr>.rpy")) {
    const Vec3 rpy = attr_vec3(o, "rpy", where + "/origin");
    if (rpy != Vec3{0.0, 0.0, 0.0}) unsupported("rotated origin in " + where);
  }
  return attr_vec3(o, "xyz", where + "/origin");
}

Vec3 read_box(const ptree& node, const std::string& where) {
  const ptree& geom = only_child(node, "geometry", where);
  check_children(geom, {"box"}, where + "/geometry");
  const ptree& box = only_child(geom, "box", where + "/geometry");
  check_attrs(box, {"size"}, where + "/box");
  return attr_vec3(box, "size", where + "/box");
}

UrdfLink read_link(const ptree& node) {
  UrdfLink link;
  link.name = attr(node, "name", "link");
  const std::string where = "link '" + link.name + "'";
  check_attrs(node, {"name"}, where);
  check_children(node, {"inertial", "visual", "collision"}, where);

  const ptree& in = only_child(node, "inertial", where);
  check_children(in, {"origin", "mass", "inertia"}, where + "/inertial");
  link.inertial.xyz = read_origin(in, where + "/inertial");
  link.inertial.mass = attr_real(only_child(in, "mass", where), "value", where + "/mass");
  const ptree& inertia = only_child(in, "inertia", where);
  for (const char* off : {"ixy", "ixz", "iyz"}) {
    if (attr_real(inertia, off, where + "/inertia") != 0.0) {
      unsupported("off-diagonal inertia in " + where);
    }
  }
  link.inertial.ixx = attr_real(inertia, "ixx", where + "/inertia");
  link.inertial.iyy = attr_real(inertia, "iyy", where + "/inertia");
  link.inertial.izz = attr_real(inertia, "izz", where + "/inertia");

  std::vector<UrdfBox> collisions;
  bool have_material = false;
  for (const auto& [key, child] : node) {
    if (key == "visual") {
      check_children(child, {"origin", "geometry", "material"}, where + "/visual");
      link.boxes.push_back({read_origin(child, where + "/visual"), read_box(child, where + "/visual")});
      const ptree& mat = only_child(child, "material", where + "/visual");
      check_children(mat, {"color"}, where + "/material");
      const std::string name = attr(mat, "name", where + "/material");
      const auto c = parse_numbers(attr(only_child(mat, "color", where), "rgba", where + "/color"), 4,
                                   where + "/color");
      const std::array<double, 4> rgba{c[0], c[1], c[2], c[3]};
      if (have_material && (name != link.material || rgba != link.rgba)) {
        unsupported("multiple materials in " + where);
      }
      link.material = name;
      link.rgba = rgba;
      have_material = true;
    } else if (key == "collision") {
      check_children(child, {"origin", "geometry"}, where + "/collision");
      collisions.push_back(
          {read_origin(child, where + "/collision"), read_box(child, where + "/collision")});
    }
  }
  if (collisions != link.boxes) unsupported("visual and collision geometry differ in " + where);
  return link;
}

UrdfJoint read_joint(const ptree& node) {
  UrdfJoint j;
  j.name = attr(node, "name", "joint");
  const std::string where = "joint '" + j.name + "'";
  check_attrs(node, {"name", "type"}, where);
  const std::string type = attr(node, "type", where);
  const auto t = parse_joint_type(type);
  if (!t) unsupported("joint type '" + type + "' in " + where);
  j.type = *t;
  check_children(node, {"parent", "child", "origin", "axis", "limit"}, where);
  j.parent = attr(only_child(node, "parent", where), "link", where + "/parent");
  j.child = attr(only_child(node, "child", where), "link", where + "/child");
  j.origin = read_origin(node, where);
  j.axis = attr_vec3(only_child(node, "axis", where), "xyz", where + "/axis");
  if (node.count("limit") > 0) {
    const ptree& lim = only_child(node, "limit", where);
    check_attrs(lim, {"lower", "upper", "effort", "velocity"}, where + "/limit");
    j.limit = UrdfLimit{attr_real(lim, "lower", where), attr_real(lim, "upper", where),
                        attr_real(lim, "effort", where), attr_real(lim, "velocity", where)};
  }
  return j;
}

}  // namespace

Aabb VoxelBox::canonical(int resolution) const {
  Aabb b;
  for (int a = 0; a < 3; ++a) {
    b.min[a] = static_cast<double>(lo[a]) / resolution - kCanonHalf;
    b.max[a] = static_cast<double>(hi[a]) / resolution - kCanonHalf;
  }
  return b;
}

std::vector<VoxelBox> greedy_merge(const VoxelGrid& g, int label) {
  const int r = g.resolution();
  const auto lab = static_cast<std::uint8_t>(label);
  std::vector<char> used(g.size(), 0);
  auto free_cell = [&](int i, int j, int k) {
    return g.at(i, j, k) == lab && !used[g.index(i, j, k)];
  };
  std::vector<VoxelBox> out;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (!free_cell(i, j, k)) continue;
        int x1 = i + 1;
        while (x1 < r && free_cell(x1, j, k)) ++x1;
        int y1 = j + 1;
        auto row_free = [&](int y, int z) {
          for (int x = i; x < x1; ++x) {
            if (!free_cell(x, y, z)) return false;
          }
          return true;
        };
        while (y1 < r && row_free(y1, k)) ++y1;
        int z1 = k + 1;
        auto slab_free = [&](int z) {
          for (int y = j; y < y1; ++y) {
            if (!row_free(y, z)) return false;
          }
          return true;
        };
        while (z1 < r && slab_free(z1)) ++z1;
        for (int z = k; z < z1; ++z) {
          for (int y = j; y < y1; ++y) {
            for (int x = i; x < x1; ++x) used[g.index(x, y, z)] = 1;
          }
        }
        out.push_back({{i, j, k}, {x1, y1, z1}});
      }
    }
  }
  if (out.empty()) throw Error(Errc::kEmptyPart, "label " + std::to_string(label) + " is empty");
  return out;
}

UrdfDocument to_urdf(const Blueprint& bp, const VoxelGrid& g) {
  const auto violations = validate_blueprint(bp);
  if (!violations.empty()) {
    std::string codes;
    for (const Violation& v : violations) codes += (codes.empty() ? "" : ",") + std::string(to_string(v.code));
    throw Error(Errc::kInvalidBlueprint, codes);
  }
  if (g.max_label() > static_cast<int>(bp.parts.size())) {
    throw Error(Errc::kShapeMismatch, "grid has labels beyond the part list");
  }

  const int n = static_cast<int>(bp.parts.size());
  const int r = g.resolution();
  Aabb all = bp.parts[0].bbox;
  for (const Part& p : bp.parts) {
    for (int a = 0; a < 3; ++a) {
      all.min[a] = std::min(all.min[a], p.bbox.min[a]);
      all.max[a] = std::max(all.max[a], p.bbox.max[a]);
    }
  }
  const Vec3 e = all.extent();
  const double longest = std::max({e[0], e[1], e[2]});
  const double mpu = longest > 0.0 ? bp.real_scale_m / longest : bp.real_scale_m;

  // Link frame origins in metric world coordinates, resolved root-first.
  const std::vector<int> parents = parent_indices(bp);
  std::vector<Vec3> frame(n);
  std::vector<char> done(n, 0);
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    std::vector<int> chain;
    for (int c = i; c >= 0 && !done[c]; c = parents[c]) chain.push_back(c);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const int c = *it;
      const Joint& jt = bp.parts[c].joint;
      if (parents[c] < 0) {
        frame[c] = {0.0, 0.0, 0.0};
      } else if (jt.type == JointType::kFixed) {
        frame[c] = frame[parents[c]];
      } else {
        frame[c] = canon3(mpu * jt.origin);
      }
      done[c] = 1;
      order.push_back(c);
    }
  }

  UrdfDocument doc;
  doc.name = bp.asset_id;
  for (int i = 0; i < n; ++i) {
    const Part& p = bp.parts[i];
    UrdfLink link;
    link.name = p.part_id;
    link.material = std::string(to_string(p.material));
    link.rgba = material_rgba(p.material);
    for (const VoxelBox& vb : greedy_merge(g, i + 1)) {
      const Aabb b = vb.canonical(r);
      link.boxes.push_back({canon3(mpu * b.center() - frame[i]), canon3(mpu * b.extent())});
    }
    const Vec3 size = mpu * p.bbox.extent();
    const double m = p.mass_kg;
    link.inertial.xyz = canon3(mpu * p.bbox.center() - frame[i]);
    link.inertial.mass = canonical_real(m);
    link.inertial.ixx = canonical_real(m / 12.0 * (size[1] * size[1] + size[2] * size[2]));
    link.inertial.iyy = canonical_real(m / 12.0 * (size[0] * size[0] + size[2] * size[2]));
    link.inertial.izz = canonical_real(m / 12.0 * (size[0] * size[0] + size[1] * size[1]));
    doc.links.push_back(std::move(link));
  }

  for (int i : order) {
    if (parents[i] < 0) continue;
    const Part& p = bp.parts[i];
    const Part& parent = bp.parts[parents[i]];
    UrdfJoint j;
    j.name = parent.part_id + "_to_" + p.part_id;
    j.type = p.joint.type;
    j.parent = parent.part_id;
    j.child = p.part_id;
    j.origin = canon3(frame[i] - frame[parents[i]]);
    j.axis = j.type == JointType::kFixed ? Vec3{1.0, 0.0, 0.0} : canon3(p.joint.axis);
    if (j.type == JointType::kRevolute) {
      j.limit = UrdfLimit{canonical_real(p.joint.limits.first), canonical_real(p.joint.limits.second),
                          kLimitEffort, kLimitVelocity};
    } else if (j.type == JointType::kPrismatic) {
      j.limit = UrdfLimit{canonical_real(mpu * p.joint.limits.first),
                          canonical_real(mpu * p.joint.limits.second), kLimitEffort, kLimitVelocity};
    }
    doc.joints.push_back(std::move(j));
  }
  return doc;
}

std::string serialize_urdf(const UrdfDocument& doc) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\"?>\n";
  o << "<robot name=\"" << doc.name << "\">\n";
  for (const UrdfLink& l : doc.links) {
    const std::string rgba = format_real(l.rgba[0]) + " " + format_real(l.rgba[1]) + " " +
                             format_real(l.rgba[2]) + " " + format_real(l.rgba[3]);
    o << "  <link name=\"" << l.name << "\">\n";
    o << "    <inertial>\n";
    o << "      <origin xyz=\"" << fmt3(l.inertial.xyz) << "\" rpy=\"0 0 0\"/>\n";
    o << "      <mass value=\"" << format_real(l.inertial.mass) << "\"/>\n";
    o << "      <inertia ixx=\"" << format_real(l.inertial.ixx) << "\" ixy=\"0\" ixz=\"0\" iyy=\""
      << format_real(l.inertial.iyy) << "\" iyz=\"0\" izz=\"" << format_real(l.inertial.izz)
      << "\"/>\n";
    o << "    </inertial>\n";
    for (const UrdfBox& b : l.boxes) {
      o << "    <visual>\n";
      o << "      <origin xyz=\"" << fmt3(b.xyz) << "\" rpy=\"0 0 0\"/>\n";
      o << "      <geometry>\n        <box size=\"" << fmt3(b.size) << "\"/>\n      </geometry>\n";
      o << "      <material name=\"" << l.material << "\">\n";
      o << "        <color rgba=\"" << rgba << "\"/>\n";
      o << "      </material>\n";
      o << "    </visual>\n";
      o << "    <collision>\n";
      o << "      <origin xyz=\"" << fmt3(b.xyz) << "\" rpy=\"0 0 0\"/>\n";
      o << "      <geometry>\n        <box size=\"" << fmt3(b.size) << "\"/>\n      </geometry>\n";
      o << "    </collision>\n";
    }
    o << "  </link>\n";
  }
  for (const UrdfJoint& j : doc.joints) {
    o << "  <joint name=\"" << j.name << "\" type=\"" << to_string(j.type) << "\">\n";
    o << "    <parent link=\"" << j.parent << "\"/>\n";
    o << "    <child link=\"" << j.child << "\"/>\n";
    o << "    <origin xyz=\"" << fmt3(j.origin) << "\" rpy=\"0 0 0\"/>\n";
    o << "    <axis xyz=\"" << fmt3(j.axis) << "\"/>\n";
    if (j.limit) {
      o << "    <limit lower=\"" << format_real(j.limit->lower) << "\" upper=\""
        << format_real(j.limit->upper) << "\" effort=\"" << format_real(j.limit->effort)
        << "\" velocity=\"" << format_real(j.limit->velocity) << "\"/>\n";
    }
    o << "  </joint>\n";
  }
  o << "</robot>\n";
  return o.str();
}

UrdfDocument parse_urdf(std::string_view xml) {
  if (xml.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(Errc::kXmlSyntax, "empty document");
  }
  ptree pt;
  try {
    std::istringstream in{std::string(xml)};
    boost::property_tree::read_xml(in, pt);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw Error(Errc::kXmlSyntax, e.what());
  }
  check_children(pt, {"robot"}, "document");
  const ptree& robot = only_child(pt, "robot", "document");
  check_attrs(robot, {"name"}, "robot");
  check_children(robot, {"link", "joint"}, "robot");

  UrdfDocument doc;
  doc.name = attr(robot, "name", "robot");
  for (const auto& [key, child] : robot) {
    if (key == "link") doc.links.push_back(read_link(child));
    if (key == "joint") doc.joints.push_back(read_joint(child));
  }
  return doc;
}

}  // namespace artigen
