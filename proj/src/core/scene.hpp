#pragma once

#include <memory>
#include <string>
#include <vector>

#include "solid.hpp"

namespace hpm {

// Declarative CSG scene: analytic leaves combined with Booleans. Used to
// author targets, MMN shapes and stock boxes; voxelization classifies voxel
// centers against the tree.
struct SceneNode;
using ScenePtr = std::shared_ptr<const SceneNode>;

struct SceneNode {
  enum class Kind {
    Box,        // min, max
    Sphere,     // center, radius
    Cylinder,   // axis x|y|z, center, radius, height (along axis)
    HalfSpace,  // normal, offset: kept iff dot(x, normal) <= offset
    Union,
    Intersect,
    Subtract,   // first child minus the rest
    Complement  // single child
  };

  Kind kind;
  std::array<double, 3> a{0, 0, 0};  // min / center / normal
  std::array<double, 3> b{0, 0, 0};  // max / (radius, height, axis) packing
  int axis = 2;                      // cylinder axis: 0=x, 1=y, 2=z
  double radius = 0, height = 0, offset = 0;
  std::vector<ScenePtr> children;

  bool contains(const std::array<double, 3>& p) const;
  void validate() const;
};

ScenePtr scene_box(std::array<double, 3> min, std::array<double, 3> max);
ScenePtr scene_sphere(std::array<double, 3> center, double radius);
ScenePtr scene_cylinder(int axis, std::array<double, 3> center, double radius,
                        double height);
ScenePtr scene_half_space(std::array<double, 3> normal, double offset);
ScenePtr scene_combine(SceneNode::Kind op, std::vector<ScenePtr> children);

// JSON text -> scene tree. Throws ParseError with a field diagnostic.
ScenePtr parse_scene_json(const std::string& text);
ScenePtr load_scene(const std::string& path);

// A voxel is set iff its center classifies inside the scene. Deterministic.
VoxelSolid voxelize(const ScenePtr& scene, const GridSpec& grid);

}  // namespace hpm
