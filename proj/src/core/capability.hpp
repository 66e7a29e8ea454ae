#pragma once

#include <optional>
#include <string>

#include "morphology.hpp"

namespace hpm {

enum class Mode { AM, SM };

enum class Variant {
  MaximalUnderFill,     // U-AM: opening of the target by the instrument
  OverFillLambda,       // O-AM: lambda-relaxed motion sweep
  ConservativeOverFill, // O-AM: global thickening
  MaximalOverCut,       // O-SM: workspace minus closing
  ConservativeUnderCut, // U-SM: workspace minus shrunk target
};

Mode variant_mode(Variant v);
std::string variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

// A capability instance: instrument MMN shape B, inactive assembly C, a fixed
// orientation out of the 24 axis-aligned rotations, and a deposition/removal
// cost rate. B and C live on the workspace grid, anchored near the world
// origin.
struct Capability {
  Variant variant = Variant::MaximalUnderFill;
  VoxelSolid mmn;       // B, nonempty
  VoxelSolid assembly;  // C, may be empty
  int orientation = 0;  // index into the 24 axis-aligned rotations
  double lambda = 0.0;  // OverFillLambda only
  double rate = 1.0;    // cost per unit volume

  Mode mode() const { return variant_mode(variant); }
};

struct Primitive {
  int id = 0;  // 1-based stable index, printing order P1, P2, ...
  Mode mode = Mode::AM;
  VoxelSolid solid;
  double rate = 1.0;
  bool is_raw_stock = false;
};

// Rotate a solid by one of the 24 axis-aligned rotations about the world
// origin (exact on anchored grids, nearest-voxel otherwise), clipped.
VoxelSolid orient(const VoxelSolid& s, int orientation);

Primitive build_primitive(const Capability& cap, const VoxelSolid& target,
                          CorrelateMethod method = CorrelateMethod::Fft);

Primitive make_raw_stock(const std::array<double, 3>& box_min,
                         const std::array<double, 3>& box_max,
                         const GridSpec& grid, double rate);

Primitive primitive_from_solid(Mode mode, const VoxelSolid& solid, double rate,
                               bool is_raw_stock = false);

}  // namespace hpm
