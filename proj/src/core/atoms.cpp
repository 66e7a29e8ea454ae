#include "atoms.hpp"

#include <algorithm>
#include <sstream>

namespace hpm {

std::string atom_class_name(AtomClass c) {
  switch (c) {
    case AtomClass::Unclassified: return "unclassified";
    case AtomClass::Inside: return "inside";
    case AtomClass::Outside: return "outside";
    case AtomClass::Partial: return "partial";
    case AtomClass::PartialTolerable: return "partial_tolerable";
  }
  return "?";
}

std::string code_string(std::uint64_t code, int n) {
  std::string s(std::size_t(n), '0');
  for (int i = 0; i < n; ++i)
    if (code >> (n - 1 - i) & 1) s[std::size_t(i)] = '1';
  return s;
}

Decomposition::Decomposition(std::vector<Primitive> primitives,
                             const GridSpec& workspace)
    : primitives_(std::move(primitives)), grid_(workspace) {
  grid_.validate();
  if (int(primitives_.size()) > kMaxPrimitives)
    throw Error(ErrorCode::LimitExceeded,
                "too many primitives for single-word atom codes");
  for (std::size_t i = 0; i < primitives_.size(); ++i) {
    primitives_[i].id = int(i) + 1;
    if (primitives_[i].solid.grid() != grid_)
      throw Error(ErrorCode::GridMismatch,
                  "primitive solids must share the workspace grid");
  }
  rebuild_atoms();
}

void Decomposition::rebuild_atoms() {
  const int n = primitive_count();
  codes_.assign(std::size_t(grid_.cell_count()), 0);
  for (int i = 0; i < n; ++i) {
    const VoxelSolid& p = primitives_[std::size_t(i)].solid;
    std::uint64_t bit = std::uint64_t(1) << (n - 1 - i);
    for (std::int64_t v = 0; v < grid_.cell_count(); ++v)
      if (p.get_linear(v)) codes_[std::size_t(v)] |= bit;
  }
  atoms_.clear();
  double h3 = grid_.spacing * grid_.spacing * grid_.spacing;
  for (std::uint64_t c : codes_) ++atoms_[c].voxel_count;
  for (auto& [code, atom] : atoms_) {
    atom.code = code;
    atom.volume = double(atom.voxel_count) * h3;
  }
}

Decomposition Decomposition::classify_target(const VoxelSolid& target,
                                             double tolerance_mm) const {
  if (target.grid() != grid_)
    throw Error(ErrorCode::GridMismatch, "target must share workspace grid");
  if (tolerance_mm < 0)
    throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");

  Decomposition d = *this;
  d.target_ = target;
  d.tolerance_ = tolerance_mm;
  d.target_mask_.clear();

  VoxelSolid zone(grid_);
  if (tolerance_mm > 0) {
    VoxelSolid grown = offset_ball(target, tolerance_mm, OffsetDirection::Grow);
    VoxelSolid shrunk =
        offset_ball(target, tolerance_mm, OffsetDirection::Shrink);
    zone = subtract(grown, shrunk);
  }

  struct Tally {
    std::int64_t in = 0, out = 0, in_beyond_zone = 0, out_beyond_zone = 0;
  };
  std::map<std::uint64_t, Tally> tally;
  for (std::int64_t v = 0; v < grid_.cell_count(); ++v) {
    Tally& t = tally[d.codes_[std::size_t(v)]];
    bool in = target.get_linear(v);
    bool z = tolerance_mm > 0 && zone.get_linear(v);
    if (in) {
      ++t.in;
      if (!z) ++t.in_beyond_zone;
    } else {
      ++t.out;
      if (!z) ++t.out_beyond_zone;
    }
  }

  double h3 = grid_.spacing * grid_.spacing * grid_.spacing;
  for (auto& [code, atom] : d.atoms_) {
    const Tally& t = tally[code];
    atom.inside_overlap = double(t.in) * h3;
    atom.outside_overlap = double(t.out) * h3;
    atom.violates = false;
    atom.in_mask = false;
    if (t.out == 0) {
      atom.cls = AtomClass::Inside;
      atom.in_mask = true;
    } else if (t.in == 0) {
      atom.cls = AtomClass::Outside;
    } else {
      // Partial: tolerable iff the discrepancy on the chosen side lies fully
      // inside the tolerance zone.
      bool excess_ok = t.out_beyond_zone == 0;   // atom ^ ~target within zone
      bool deficit_ok = t.in_beyond_zone == 0;   // atom ^ target within zone
      if (excess_ok && deficit_ok) {
        atom.cls = AtomClass::PartialTolerable;
        atom.in_mask = t.in >= t.out;
      } else if (excess_ok) {
        atom.cls = AtomClass::PartialTolerable;
        atom.in_mask = true;
      } else if (deficit_ok) {
        atom.cls = AtomClass::PartialTolerable;
        atom.in_mask = false;
      } else {
        atom.cls = AtomClass::Partial;
        atom.violates = true;
      }
    }
    // The all-zeros atom lies outside every primitive: no plan starting from
    // the empty state can deposit it.
    if (code == 0 && atom.in_mask) {
      atom.in_mask = false;
      atom.violates = true;
      atom.cls = AtomClass::Partial;
    }
    if (atom.in_mask) d.target_mask_.insert(code);
  }
  d.classified_ = true;
  return d;
}

Decomposition::TestResult Decomposition::manufacturability_test() const {
  if (!classified_)
    throw Error(ErrorCode::NotReady, "classify_target has not been run");
  TestResult r;
  for (const auto& [code, atom] : atoms_)
    if (atom.violates) r.violating_codes.push_back(code);
  r.candidate = r.violating_codes.empty();
  return r;
}

std::vector<Decomposition::SplitEntry> Decomposition::split_report() const {
  if (!classified_)
    throw Error(ErrorCode::NotReady, "classify_target has not been run");
  std::vector<SplitEntry> out;
  for (const auto& [code, atom] : atoms_) {
    if (!atom.violates) continue;
    SplitEntry e;
    e.code = code;
    e.subatom_in = VoxelSolid(grid_);
    e.subatom_out = VoxelSolid(grid_);
    for (std::int64_t v = 0; v < grid_.cell_count(); ++v) {
      if (codes_[std::size_t(v)] != code) continue;
      if (target_.get_linear(v))
        e.subatom_in.set_linear(v);
      else
        e.subatom_out.set_linear(v);
    }
    out.push_back(std::move(e));
  }
  return out;
}

Decomposition Decomposition::refine(const Primitive& new_primitive) const {
  if (new_primitive.solid.grid() != grid_)
    throw Error(ErrorCode::GridMismatch,
                "refining primitive must share the workspace grid");
  if (primitive_count() + 1 > kMaxPrimitives)
    throw Error(ErrorCode::LimitExceeded, "primitive limit reached");

  Decomposition d;
  d.primitives_ = primitives_;
  d.primitives_.push_back(new_primitive);
  d.primitives_.back().id = int(d.primitives_.size());
  d.grid_ = grid_;
  // Each existing atom splits in place: append the new membership bit.
  d.codes_.resize(codes_.size());
  for (std::int64_t v = 0; v < grid_.cell_count(); ++v)
    d.codes_[std::size_t(v)] = codes_[std::size_t(v)] << 1 |
                               std::uint64_t(new_primitive.solid.get_linear(v));
  double h3 = grid_.spacing * grid_.spacing * grid_.spacing;
  for (std::uint64_t c : d.codes_) ++d.atoms_[c].voxel_count;
  for (auto& [code, atom] : d.atoms_) {
    atom.code = code;
    atom.volume = double(atom.voxel_count) * h3;
  }
  return d;
}

VoxelSolid Decomposition::atom_solid(std::uint64_t code) const {
  VoxelSolid s(grid_);
  for (std::int64_t v = 0; v < grid_.cell_count(); ++v)
    if (codes_[std::size_t(v)] == code) s.set_linear(v);
  return s;
}

VoxelSolid Decomposition::mask_solid() const {
  VoxelSolid s(grid_);
  for (std::int64_t v = 0; v < grid_.cell_count(); ++v)
    if (target_mask_.count(codes_[std::size_t(v)])) s.set_linear(v);
  return s;
}

std::string Decomposition::atoms_csv() const {
  std::ostringstream out;
  out << "code,voxel_count,volume_mm3,classification,inside_overlap_mm3,"
         "outside_overlap_mm3\n";
  int n = primitive_count();
  out.precision(12);
  for (const auto& [code, atom] : atoms_) {
    out << code_string(code, n) << ',' << atom.voxel_count << ',' << atom.volume
        << ',' << atom_class_name(atom.cls) << ',' << atom.inside_overlap << ','
        << atom.outside_overlap << '\n';
  }
  return out.str();
}

}  // namespace hpm
