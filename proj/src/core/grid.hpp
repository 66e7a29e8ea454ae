#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "error.hpp"

namespace hpm {

// Axis-aligned voxel lattice. Voxel (i,j,k) occupies the cube whose corner is
// origin + (i,j,k)*h; its center is origin + (i+0.5, j+0.5, k+0.5)*h.
// Layout is row-major with x fastest.
struct GridSpec {
  std::int64_t nx = 0, ny = 0, nz = 0;
  double spacing = 1.0;                       // voxel edge length (mm)
  std::array<double, 3> origin = {0, 0, 0};   // world corner of voxel (0,0,0)

  std::int64_t cell_count() const { return nx * ny * nz; }

  bool operator==(const GridSpec& o) const {
    return nx == o.nx && ny == o.ny && nz == o.nz && spacing == o.spacing &&
           origin == o.origin;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return (k * ny + j) * nx + i;
  }
  bool contains(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
  }

  std::array<double, 3> center(std::int64_t i, std::int64_t j,
                               std::int64_t k) const {
    return {origin[0] + (double(i) + 0.5) * spacing,
            origin[1] + (double(j) + 0.5) * spacing,
            origin[2] + (double(k) + 0.5) * spacing};
  }

  // Index of the voxel whose center is nearest the world origin; used as the
  // anchor of structuring elements in Minkowski operations.
  std::array<std::int64_t, 3> anchor() const {
    std::array<std::int64_t, 3> a;
    for (int ax = 0; ax < 3; ++ax)
      a[ax] = std::llround(-origin[ax] / spacing - 0.5);
    return a;
  }

  // Reflection through the world origin maps voxel index i to R - i per axis.
  std::array<std::int64_t, 3> reflect_constant() const {
    std::array<std::int64_t, 3> r;
    for (int ax = 0; ax < 3; ++ax)
      r[ax] = std::llround(-2.0 * origin[ax] / spacing - 1.0);
    return r;
  }

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
      throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1");
    if (!(spacing > 0) || !std::isfinite(spacing))
      throw Error(ErrorCode::InvalidArgument, "grid spacing must be > 0");
    for (double v : origin)
      if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "grid origin must be finite");
  }
};

// Grid with nx*ny*nz voxels whose world origin sits at the center voxel's
// center (requires odd dims for exact symmetry, but any dims are accepted).
inline GridSpec centered_grid(std::int64_t nx, std::int64_t ny, std::int64_t nz,
                              double h) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.spacing = h;
  g.origin = {-(std::floor(nx / 2.0) + 0.5) * h,
              -(std::floor(ny / 2.0) + 0.5) * h,
              -(std::floor(nz / 2.0) + 0.5) * h};
  g.validate();
  return g;
}

}  // namespace hpm
