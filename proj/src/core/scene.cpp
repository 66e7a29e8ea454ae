#include "scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hpm {

using nlohmann::json;

bool SceneNode::contains(const std::array<double, 3>& p) const {
  switch (kind) {
    case Kind::Box:
      return p[0] >= a[0] && p[0] <= b[0] && p[1] >= a[1] && p[1] <= b[1] &&
             p[2] >= a[2] && p[2] <= b[2];
    case Kind::Sphere: {
      double dx = p[0] - a[0], dy = p[1] - a[1], dz = p[2] - a[2];
      return dx * dx + dy * dy + dz * dz <= radius * radius;
    }
    case Kind::Cylinder: {
      double ax = p[axis] - a[axis];
      if (std::abs(ax) > height / 2) return false;
      int u = (axis + 1) % 3, v = (axis + 2) % 3;
      double du = p[u] - a[u], dv = p[v] - a[v];
      return du * du + dv * dv <= radius * radius;
    }
    case Kind::HalfSpace:
      return p[0] * a[0] + p[1] * a[1] + p[2] * a[2] <= offset;
    case Kind::Union:
      for (const auto& c : children)
        if (c->contains(p)) return true;
      return false;
    case Kind::Intersect:
      if (children.empty()) return false;
      for (const auto& c : children)
        if (!c->contains(p)) return false;
      return true;
    case Kind::Subtract:
      if (children.empty()) return false;
      if (!children[0]->contains(p)) return false;
      for (std::size_t i = 1; i < children.size(); ++i)
        if (children[i]->contains(p)) return false;
      return true;
    case Kind::Complement:
      return !children[0]->contains(p);
  }
  return false;
}

void SceneNode::validate() const {
  auto finite3 = [](const std::array<double, 3>& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
  };
  switch (kind) {
    case Kind::Box:
      if (!finite3(a) || !finite3(b) || a[0] >= b[0] || a[1] >= b[1] ||
          a[2] >= b[2])
        throw Error(ErrorCode::InvalidArgument, "box must have positive extent");
      break;
    case Kind::Sphere:
      if (!finite3(a) || !(radius > 0) || !std::isfinite(radius))
        throw Error(ErrorCode::InvalidArgument, "sphere radius must be > 0");
      break;
    case Kind::Cylinder:
      if (!finite3(a) || !(radius > 0) || !(height > 0) || axis < 0 || axis > 2)
        throw Error(ErrorCode::InvalidArgument, "bad cylinder parameters");
      break;
    case Kind::HalfSpace:
      if (!finite3(a) || !std::isfinite(offset) ||
          (a[0] == 0 && a[1] == 0 && a[2] == 0))
        throw Error(ErrorCode::InvalidArgument, "half-space needs a normal");
      break;
    case Kind::Complement:
      if (children.size() != 1)
        throw Error(ErrorCode::InvalidArgument,
                    "complement takes exactly one child");
      break;
    default:
      break;
  }
  for (const auto& c : children) c->validate();
}

namespace {

ScenePtr make(SceneNode n) {
  auto p = std::make_shared<SceneNode>(std::move(n));
  p->validate();
  return p;
}

}  // namespace

ScenePtr scene_box(std::array<double, 3> min, std::array<double, 3> max) {
  SceneNode n;
  n.kind = SceneNode::Kind::Box;
  n.a = min;
  n.b = max;
  return make(std::move(n));
}

ScenePtr scene_sphere(std::array<double, 3> center, double radius) {
  SceneNode n;
  n.kind = SceneNode::Kind::Sphere;
  n.a = center;
  n.radius = radius;
  return make(std::move(n));
}

ScenePtr scene_cylinder(int axis, std::array<double, 3> center, double radius,
                        double height) {
  SceneNode n;
  n.kind = SceneNode::Kind::Cylinder;
  n.a = center;
  n.axis = axis;
  n.radius = radius;
  n.height = height;
  return make(std::move(n));
}

ScenePtr scene_half_space(std::array<double, 3> normal, double offset) {
  SceneNode n;
  n.kind = SceneNode::Kind::HalfSpace;
  n.a = normal;
  n.offset = offset;
  return make(std::move(n));
}

ScenePtr scene_combine(SceneNode::Kind op, std::vector<ScenePtr> children) {
  SceneNode n;
  n.kind = op;
  n.children = std::move(children);
  return make(std::move(n));
}

namespace {

std::array<double, 3> vec3(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].size() != 3)
    throw Error(ErrorCode::ParseError,
                std::string("scene: missing/bad vector field '") + field + "'");
  std::array<double, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = j[field][i].get<double>();
  return v;
}

ScenePtr parse_node(const json& j) {
  if (!j.is_object())
    throw Error(ErrorCode::ParseError, "scene: node must be an object");
  if (j.contains("shape")) {
    std::string s = j["shape"].get<std::string>();
    if (s == "box") return scene_box(vec3(j, "min"), vec3(j, "max"));
    if (s == "sphere")
      return scene_sphere(vec3(j, "center"), j.value("radius", 0.0));
    if (s == "cylinder") {
      std::string ax = j.value("axis", "z");
      int axis = ax == "x" ? 0 : ax == "y" ? 1 : 2;
      return scene_cylinder(axis, vec3(j, "center"), j.value("radius", 0.0),
                            j.value("height", 0.0));
    }
    if (s == "halfspace")
      return scene_half_space(vec3(j, "normal"), j.value("offset", 0.0));
    throw Error(ErrorCode::ParseError, "scene: unknown shape '" + s + "'");
  }
  if (j.contains("op")) {
    std::string op = j["op"].get<std::string>();
    std::vector<ScenePtr> children;
    for (const auto& c : j.value("children", json::array()))
      children.push_back(parse_node(c));
    if (op == "union")
      return scene_combine(SceneNode::Kind::Union, std::move(children));
    if (op == "intersect")
      return scene_combine(SceneNode::Kind::Intersect, std::move(children));
    if (op == "subtract")
      return scene_combine(SceneNode::Kind::Subtract, std::move(children));
    if (op == "complement")
      return scene_combine(SceneNode::Kind::Complement, std::move(children));
    throw Error(ErrorCode::ParseError, "scene: unknown op '" + op + "'");
  }
  throw Error(ErrorCode::ParseError, "scene: node needs 'shape' or 'op'");
}

}  // namespace

ScenePtr parse_scene_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("scene JSON: ") + e.what());
  }
  return parse_node(j);
}

ScenePtr load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open scene file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene_json(ss.str());
}

VoxelSolid voxelize(const ScenePtr& scene, const GridSpec& grid) {
  grid.validate();
  if (!scene) throw Error(ErrorCode::InvalidArgument, "null scene");
  scene->validate();
  VoxelSolid s(grid);
  for (std::int64_t k = 0; k < grid.nz; ++k)
    for (std::int64_t j = 0; j < grid.ny; ++j)
      for (std::int64_t i = 0; i < grid.nx; ++i)
        if (scene->contains(grid.center(i, j, k))) s.set(i, j, k);
  return s;
}

}  // namespace hpm
