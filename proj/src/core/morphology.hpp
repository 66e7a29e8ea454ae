#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solid.hpp"

namespace hpm {

enum class CorrelateMethod { Direct, Fft };

// Integer overlap counts over the offset lattice: counts[tau] = |a ^ (b+tau)|.
// The offset grid spans the full correlation support (2n-1 per axis) with
// offset (0,0,0) at the middle index.
struct OverlapField {
  GridSpec grid;  // offset lattice
  std::vector<std::uint32_t> counts;

  std::array<std::int64_t, 3> center() const {
    return {grid.nx / 2, grid.ny / 2, grid.nz / 2};
  }
  std::uint32_t at_offset(std::int64_t tx, std::int64_t ty,
                          std::int64_t tz) const;
};

// Set of lattice translations, stored as a VoxelSolid over the offset grid.
struct TranslationSet {
  VoxelSolid members;  // offset-grid solid

  const GridSpec& grid() const { return members.grid(); }
  bool has_offset(std::int64_t tx, std::int64_t ty, std::int64_t tz) const;
  void set_offset(std::int64_t tx, std::int64_t ty, std::int64_t tz);
  // {-tau | tau in members}; exact because the offset window is symmetric.
  TranslationSet negated() const;
};

GridSpec offset_grid(const GridSpec& workspace);
TranslationSet empty_translation_set(const GridSpec& workspace);

// counts[tau] = |{x : x in a, x - tau in b}|. Both methods agree integer for
// integer; the FFT path rounds to nearest and clamps at zero.
OverlapField correlate(const VoxelSolid& a, const VoxelSolid& b,
                       CorrelateMethod method = CorrelateMethod::Fft);

// C-space obstacle: offsets placing d in collision with s. Single-voxel
// contacts count as collisions.
TranslationSet obstacle(const VoxelSolid& s, const VoxelSolid& d,
                        CorrelateMethod method = CorrelateMethod::Fft);
TranslationSet free_space(const VoxelSolid& s, const VoxelSolid& d,
                          CorrelateMethod method = CorrelateMethod::Fft);

// Offsets where the moving instrument d overlaps target_complement by at most
// lambda * mmn_volume voxels. lambda = 0 reduces to free_space.
TranslationSet lambda_motion(const VoxelSolid& target_complement,
                             const VoxelSolid& d, std::int64_t mmn_volume,
                             double lambda,
                             CorrelateMethod method = CorrelateMethod::Fft);

// Union / intersection of b translated by every member offset, clipped to b's
// grid. erode over an empty translation set yields the full workspace.
VoxelSolid dilate(const TranslationSet& t, const VoxelSolid& b);
VoxelSolid erode(const TranslationSet& t, const VoxelSolid& b);

enum class MinkowskiOp { Sum, Difference };

// Structuring element b is anchored at the voxel nearest the world origin.
// Sum: superlevel {>=1} of the convolution counts. Difference: containment of
// every in-grid probe (probes leaving the grid count as satisfied, the
// adjoint convention to the sum's zero padding), so the pair forms the
// classic adjoint opening (s (-) reflect(B)) (+) B even at grid borders.
VoxelSolid minkowski(const VoxelSolid& a, MinkowskiOp op, const VoxelSolid& b,
                     CorrelateMethod method = CorrelateMethod::Fft);

// a (op) reflect(b), with the reflection applied arithmetically so elements
// whose mirror image leaves the grid are not lost.
VoxelSolid minkowski_reflected(const VoxelSolid& a, MinkowskiOp op,
                               const VoxelSolid& b,
                               CorrelateMethod method = CorrelateMethod::Fft);

// opening = (s (-) reflect(D)) (+) b, closing = (s (+) reflect(D)) (-) b,
// with instrument D = b U c.
VoxelSolid opening(const VoxelSolid& s, const VoxelSolid& b,
                   const VoxelSolid& c,
                   CorrelateMethod method = CorrelateMethod::Fft);
VoxelSolid closing(const VoxelSolid& s, const VoxelSolid& b,
                   const VoxelSolid& c,
                   CorrelateMethod method = CorrelateMethod::Fft);

// Discrete ball of radius r (mm) anchored at the world origin.
VoxelSolid ball_element(const GridSpec& grid, double r);

enum class OffsetDirection { Grow, Shrink };
VoxelSolid offset_ball(const VoxelSolid& s, double r, OffsetDirection dir,
                       CorrelateMethod method = CorrelateMethod::Fft);

// Union of b rotated about an axis-aligned line at uniformly sampled angles,
// nearest-voxel resampling. axis: 0=x, 1=y, 2=z; axis_pos gives the two world
// coordinates of the line in the plane normal to the axis (mm).
VoxelSolid revolve(const VoxelSolid& b, int axis, std::array<double, 2> axis_pos,
                   int angular_samples);

// Counts exported with the raw grid header (magic HPVF), little-endian u32.
void save_field(const OverlapField& f, const std::string& path);

}  // namespace hpm
