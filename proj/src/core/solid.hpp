#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "grid.hpp"

namespace hpm {

// Bit-packed occupancy grid. The universal geometry currency: workpiece
// states, structuring elements, translation sets and tolerance zones are all
// VoxelSolids over some GridSpec.
class VoxelSolid {
 public:
  VoxelSolid() = default;
  explicit VoxelSolid(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  bool get(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return get_linear(grid_.index(i, j, k));
  }
  bool get_linear(std::int64_t idx) const {
    return (words_[std::uint64_t(idx) >> 6] >> (idx & 63)) & 1u;
  }
  void set(std::int64_t i, std::int64_t j, std::int64_t k, bool v = true) {
    set_linear(grid_.index(i, j, k), v);
  }
  void set_linear(std::int64_t idx, bool v = true) {
    std::uint64_t& w = words_[std::uint64_t(idx) >> 6];
    std::uint64_t m = std::uint64_t(1) << (idx & 63);
    w = v ? (w | m) : (w & ~m);
  }

  std::int64_t popcount() const;
  bool empty() const { return popcount() == 0; }
  double measure() const { return double(popcount()) * spacing_cubed(); }
  double spacing_cubed() const {
    return grid_.spacing * grid_.spacing * grid_.spacing;
  }

  bool operator==(const VoxelSolid& o) const {
    return grid_ == o.grid_ && words_ == o.words_;
  }
  bool operator!=(const VoxelSolid& o) const { return !(*this == o); }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  void fill();
  void clear();

 private:
  void mask_tail();
  friend VoxelSolid unite(const VoxelSolid&, const VoxelSolid&);
  friend VoxelSolid intersect(const VoxelSolid&, const VoxelSolid&);
  friend VoxelSolid subtract(const VoxelSolid&, const VoxelSolid&);
  friend VoxelSolid complement(const VoxelSolid&);

  GridSpec grid_;
  std::vector<std::uint64_t> words_;
};

// Regularized Booleans, closed over a shared grid. Grid mismatch throws.
VoxelSolid unite(const VoxelSolid& a, const VoxelSolid& b);
VoxelSolid intersect(const VoxelSolid& a, const VoxelSolid& b);
VoxelSolid subtract(const VoxelSolid& a, const VoxelSolid& b);
// Complement relative to the grid universe (the machine workspace).
VoxelSolid complement(const VoxelSolid& a);

bool is_subset(const VoxelSolid& a, const VoxelSolid& b);

// Mirror through the grid's world origin, clipped silently at grid bounds.
VoxelSolid reflect(const VoxelSolid& s);

// Translate by a lattice offset (voxels), clipped at grid bounds.
VoxelSolid translated(const VoxelSolid& s, std::int64_t dx, std::int64_t dy,
                      std::int64_t dz);

// Raw grid file ("HPVX"): magic, version u16, dims 3xu32, spacing f64,
// origin 3xf64, bit-packed occupancy, little-endian, x fastest.
void save_solid(const VoxelSolid& s, const std::string& path);
VoxelSolid load_solid(const std::string& path);
void write_solid(const VoxelSolid& s, std::ostream& out);
VoxelSolid read_solid(std::istream& in);

}  // namespace hpm
