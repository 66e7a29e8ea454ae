#pragma once

// Shared test fixtures: a planar four-primitive logic fixture with a known
// atom census, a lattice-style five-primitive machining fixture, and seeded
// random-solid helpers used by the property suites.

#include <random>

#include "core/pipeline.hpp"

namespace fixtures {

using namespace hpm;

// Axis-aligned voxel box on an integer index range [lo, hi) per axis.
inline VoxelSolid index_box(const GridSpec& g, std::array<std::int64_t, 3> lo,
                            std::array<std::int64_t, 3> hi) {
  VoxelSolid s(g);
  for (std::int64_t z = lo[2]; z < hi[2]; ++z)
    for (std::int64_t y = lo[1]; y < hi[1]; ++y)
      for (std::int64_t x = lo[0]; x < hi[0]; ++x) s.set(x, y, z);
  return s;
}

inline VoxelSolid random_solid(const GridSpec& g, std::mt19937_64& rng,
                               double density = 0.5) {
  VoxelSolid s(g);
  std::bernoulli_distribution bit(density);
  for (std::int64_t v = 0; v < g.cell_count(); ++v)
    if (bit(rng)) s.set_linear(v);
  return s;
}

// A random blobby solid: union of a few boxes. More structured than pure
// noise, so morphological identities get exercised on meaningful shapes.
inline VoxelSolid random_boxes(const GridSpec& g, std::mt19937_64& rng,
                               int count = 3) {
  VoxelSolid s(g);
  for (int b = 0; b < count; ++b) {
    std::array<std::int64_t, 3> lo{}, hi{};
    std::array<std::int64_t, 3> dims{g.nx, g.ny, g.nz};
    for (int a = 0; a < 3; ++a) {
      std::uniform_int_distribution<std::int64_t> lod(0, dims[std::size_t(a)] - 1);
      lo[std::size_t(a)] = lod(rng);
      std::uniform_int_distribution<std::int64_t> hid(
          lo[std::size_t(a)] + 1, dims[std::size_t(a)]);
      hi[std::size_t(a)] = hid(rng);
    }
    s = unite(s, index_box(g, lo, hi));
  }
  return s;
}

// ---- planar logic fixture --------------------------------------------
//
// Four box primitives on a 24 x 24 x 1 slab arranged so that P2 and P4 are
// disjoint, exactly 11 of the 16 canonical intersections are nonempty, and
// the empty codes are {0011, 0101, 0111, 1101, 1111}. The design target is
// (P1 U P2) - P3 - P4. P1 and P2 deposit; P3 and P4 remove.
struct LogicFixture {
  GridSpec grid;
  std::vector<Primitive> primitives;  // P1, P2 AM; P3, P4 SM
  VoxelSolid target;
};

inline LogicFixture logic_fixture() {
  LogicFixture f;
  f.grid = centered_grid(24, 24, 1, 1.0);
  VoxelSolid p1 = index_box(f.grid, {2, 8, 0}, {12, 20, 1});
  VoxelSolid p2 = index_box(f.grid, {9, 8, 0}, {19, 20, 1});
  VoxelSolid p3 = index_box(f.grid, {4, 8, 0}, {22, 10, 1});
  VoxelSolid p4 = index_box(f.grid, {3, 2, 0}, {7, 12, 1});
  f.primitives.push_back(primitive_from_solid(Mode::AM, p1, 1.30));
  f.primitives.push_back(primitive_from_solid(Mode::AM, p2, 2.15));
  f.primitives.push_back(primitive_from_solid(Mode::SM, p3, 0.85));
  f.primitives.push_back(primitive_from_solid(Mode::SM, p4, 0.75));
  f.target = subtract(subtract(unite(p1, p2), p3), p4);
  return f;
}

// ---- lattice-style machining fixture ---------------------------------
//
// A block machined from raw stock: a pocket and two through-slots are cut
// out, then a lattice-like cross is deposited back inside the pocket. The
// slots pass through the pocket and clip the lattice arms, so every valid
// plan must deposit the lattice after all three cuts.
//
//   P1  raw stock box            AM  rate 1.30
//   P2  lattice cross            AM  rate 2.15  (built as an under-fill)
//   P3  pocket + exterior cut    SM  rate 0.85  (over-cut of block - pocket)
//   P4  slot A + exterior cut    SM  rate 0.75  (over-cut of block - slotA)
//   P5  slot B + exterior cut    SM  rate 1.50  (over-cut of block - slotB)
struct LatticeFixture {
  GridSpec grid;
  std::vector<Primitive> primitives;  // P1..P5 in order
  VoxelSolid target;
};

inline LatticeFixture lattice_fixture() {
  LatticeFixture f;
  f.grid = centered_grid(16, 16, 8, 1.0);
  const GridSpec& g = f.grid;

  VoxelSolid block = index_box(g, {2, 2, 1}, {14, 14, 6});
  VoxelSolid pocket = index_box(g, {4, 4, 3}, {12, 12, 6});
  VoxelSolid slot_a = index_box(g, {6, 0, 2}, {8, 16, 6});   // along y
  VoxelSolid slot_b = index_box(g, {0, 9, 2}, {16, 11, 6});  // along x
  VoxelSolid lattice = unite(index_box(g, {5, 7, 3}, {11, 8, 5}),
                             index_box(g, {7, 5, 3}, {8, 11, 5}));

  f.target = unite(subtract(subtract(subtract(block, pocket), slot_a), slot_b),
                   lattice);

  // Single-voxel MMN at the anchor: under-fill reproduces the region, and the
  // over-cuts reduce to plain complements of the kept shape.
  VoxelSolid mmn1(g);
  auto c = g.anchor();
  mmn1.set(c[0], c[1], c[2]);

  auto under_fill = [&](const VoxelSolid& region) {
    Capability cap;
    cap.variant = Variant::MaximalUnderFill;
    cap.mmn = mmn1;
    cap.assembly = VoxelSolid(g);
    return build_primitive(cap, region, CorrelateMethod::Direct);
  };
  auto over_cut = [&](const VoxelSolid& keep) {
    Capability cap;
    cap.variant = Variant::MaximalOverCut;
    cap.mmn = mmn1;
    cap.assembly = VoxelSolid(g);
    return build_primitive(cap, keep, CorrelateMethod::Direct);
  };

  Primitive p1 = make_raw_stock({-6.5, -6.5, -3.5}, {6.5, 6.5, 2.5}, g, 1.30);
  Primitive p2 = under_fill(lattice);
  p2.rate = 2.15;
  Primitive p3 = over_cut(subtract(block, pocket));
  p3.rate = 0.85;
  Primitive p4 = over_cut(subtract(block, slot_a));
  p4.rate = 0.75;
  Primitive p5 = over_cut(subtract(block, slot_b));
  p5.rate = 1.50;
  f.primitives = {p1, p2, p3, p4, p5};
  return f;
}

}  // namespace fixtures
