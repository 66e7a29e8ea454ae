#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "capability.hpp"

namespace hpm {

enum class AtomClass { Unclassified, Inside, Outside, Partial, PartialTolerable };

std::string atom_class_name(AtomClass c);

// Bit i (1-based primitive index) sits at position n-i: P1 is the most
// significant of the n code bits, so code 0b1100 with n=4 reads "1100".
std::string code_string(std::uint64_t code, int n);

struct Atom {
  std::uint64_t code = 0;
  std::int64_t voxel_count = 0;
  double volume = 0;
  AtomClass cls = AtomClass::Unclassified;
  double inside_overlap = 0;   // volume of atom inside the target
  double outside_overlap = 0;  // volume of atom outside the target
  bool in_mask = false;        // included in the target mask J_M
  bool violates = false;       // partial beyond the tolerance zone
};

// Canonical atomic decomposition of the workspace induced by a primitive set.
// Immutable after construction; classification returns an updated copy.
class Decomposition {
 public:
  static constexpr int kMaxPrimitives = 62;

  Decomposition() = default;
  Decomposition(std::vector<Primitive> primitives, const GridSpec& workspace);

  const GridSpec& grid() const { return grid_; }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  int primitive_count() const { return int(primitives_.size()); }
  const std::map<std::uint64_t, Atom>& atoms() const { return atoms_; }
  const std::vector<std::uint64_t>& per_voxel_codes() const { return codes_; }
  bool classified() const { return classified_; }
  double tolerance() const { return tolerance_; }
  const std::set<std::uint64_t>& target_mask() const { return target_mask_; }
  const VoxelSolid& target() const { return target_; }

  // Fill classifications and the target mask under an offset tolerance zone.
  Decomposition classify_target(const VoxelSolid& target,
                                double tolerance_mm) const;

  // Early weak test: decisive for non-manufacturability only.
  struct TestResult {
    bool candidate = false;
    std::vector<std::uint64_t> violating_codes;
  };
  TestResult manufacturability_test() const;

  // Subatomic split specification for every violating atom.
  struct SplitEntry {
    std::uint64_t code;
    VoxelSolid subatom_in;   // atom ^ target
    VoxelSolid subatom_out;  // atom ^ ~target
  };
  std::vector<SplitEntry> split_report() const;

  // Append one primitive; bit-identical to a full recompute with it appended.
  Decomposition refine(const Primitive& new_primitive) const;

  VoxelSolid atom_solid(std::uint64_t code) const;
  VoxelSolid mask_solid() const;  // union of target-mask atoms

  std::string atoms_csv() const;

 private:
  void rebuild_atoms();

  std::vector<Primitive> primitives_;
  GridSpec grid_;
  std::vector<std::uint64_t> codes_;
  std::map<std::uint64_t, Atom> atoms_;
  std::set<std::uint64_t> target_mask_;
  VoxelSolid target_;
  double tolerance_ = 0;
  bool classified_ = false;
};

}  // namespace hpm
