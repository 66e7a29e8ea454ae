#include "capability.hpp"

#include "scene.hpp"

namespace hpm {

Mode variant_mode(Variant v) {
  switch (v) {
    case Variant::MaximalUnderFill:
    case Variant::OverFillLambda:
    case Variant::ConservativeOverFill:
      return Mode::AM;
    case Variant::MaximalOverCut:
    case Variant::ConservativeUnderCut:
      return Mode::SM;
  }
  return Mode::AM;
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::MaximalUnderFill: return "maximal_under_fill";
    case Variant::OverFillLambda: return "over_fill_lambda";
    case Variant::ConservativeOverFill: return "conservative_over_fill";
    case Variant::MaximalOverCut: return "maximal_over_cut";
    case Variant::ConservativeUnderCut: return "conservative_under_cut";
  }
  return "?";
}

std::optional<Variant> variant_from_name(const std::string& name) {
  if (name == "maximal_under_fill") return Variant::MaximalUnderFill;
  if (name == "over_fill_lambda") return Variant::OverFillLambda;
  if (name == "conservative_over_fill") return Variant::ConservativeOverFill;
  if (name == "maximal_over_cut") return Variant::MaximalOverCut;
  if (name == "conservative_under_cut") return Variant::ConservativeUnderCut;
  return std::nullopt;
}

namespace {

// The 24 proper axis-aligned rotations, as signed permutation matrices.
struct Rot {
  int perm[3];
  int sign[3];
};

const Rot& rotation(int idx) {
  static std::vector<Rot> rots = [] {
    std::vector<Rot> out;
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& p : perms) {
      // permutation parity
      int inv = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (p[i] > p[j]) ++inv;
      int pparity = inv % 2 ? -1 : 1;
      for (int s = 0; s < 8; ++s) {
        int sg[3] = {s & 1 ? -1 : 1, s & 2 ? -1 : 1, s & 4 ? -1 : 1};
        if (pparity * sg[0] * sg[1] * sg[2] != 1) continue;  // det must be +1
        Rot r;
        for (int i = 0; i < 3; ++i) {
          r.perm[i] = p[i];
          r.sign[i] = sg[i];
        }
        out.push_back(r);
      }
    }
    return out;
  }();
  if (idx < 0 || idx >= int(rots.size()))
    throw Error(ErrorCode::InvalidArgument, "orientation index must be 0..23");
  return rots[idx];
}

}  // namespace

VoxelSolid orient(const VoxelSolid& s, int orientation) {
  if (orientation == 0) return s;
  const Rot& r = rotation(orientation);
  const GridSpec& g = s.grid();
  std::array<std::int64_t, 3> n = {g.nx, g.ny, g.nz};
  VoxelSolid out(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i) {
        if (!s.get(i, j, k)) continue;
        auto p = g.center(i, j, k);
        double q[3];
        for (int ax = 0; ax < 3; ++ax) q[ax] = r.sign[ax] * p[r.perm[ax]];
        std::array<std::int64_t, 3> idx;
        bool ok = true;
        for (int ax = 0; ax < 3; ++ax) {
          idx[ax] = std::llround((q[ax] - g.origin[ax]) / g.spacing - 0.5);
          if (idx[ax] < 0 || idx[ax] >= n[ax]) ok = false;
        }
        if (ok) out.set(idx[0], idx[1], idx[2]);
      }
  return out;
}

Primitive build_primitive(const Capability& cap, const VoxelSolid& target,
                          CorrelateMethod method) {
  if (cap.mmn.empty())
    throw Error(ErrorCode::InvalidArgument, "capability MMN must be nonempty");
  if (cap.lambda != 0.0 && cap.variant != Variant::OverFillLambda)
    throw Error(ErrorCode::InvalidArgument,
                "lambda supplied for a non-lambda variant");
  if (cap.mmn.grid() != target.grid() ||
      cap.assembly.grid() != target.grid())
    throw Error(ErrorCode::GridMismatch,
                "capability shapes must share the target grid");

  VoxelSolid b = orient(cap.mmn, cap.orientation);
  VoxelSolid c = orient(cap.assembly, cap.orientation);
  bool has_assembly = !c.empty();

  Primitive p;
  p.mode = cap.mode();
  p.rate = cap.rate;

  switch (cap.variant) {
    case Variant::MaximalUnderFill:
      p.solid = opening(target, b, c, method);
      break;
    case Variant::OverFillLambda: {
      VoxelSolid d = unite(b, c);
      TranslationSet t = lambda_motion(complement(target), d, b.popcount(),
                                       cap.lambda, method);
      p.solid = dilate(t, b);
      break;
    }
    case Variant::ConservativeOverFill: {
      VoxelSolid base = has_assembly
                            ? minkowski_reflected(
                                  target, MinkowskiOp::Difference, c, method)
                            : target;
      p.solid = minkowski(base, MinkowskiOp::Sum, b, method);
      break;
    }
    case Variant::MaximalOverCut:
      p.solid = complement(closing(target, b, c, method));
      break;
    case Variant::ConservativeUnderCut: {
      VoxelSolid base =
          has_assembly
              ? minkowski_reflected(target, MinkowskiOp::Sum, c, method)
              : target;
      p.solid = complement(minkowski(base, MinkowskiOp::Difference, b, method));
      break;
    }
  }
  return p;
}

Primitive make_raw_stock(const std::array<double, 3>& box_min,
                         const std::array<double, 3>& box_max,
                         const GridSpec& grid, double rate) {
  for (int i = 0; i < 3; ++i)
    if (!(box_min[i] < box_max[i]))
      throw Error(ErrorCode::InvalidArgument, "degenerate stock box");
  Primitive p;
  p.mode = Mode::AM;
  p.is_raw_stock = true;
  p.rate = rate;
  p.solid = voxelize(scene_box(box_min, box_max), grid);
  return p;
}

Primitive primitive_from_solid(Mode mode, const VoxelSolid& solid, double rate,
                               bool is_raw_stock) {
  if (is_raw_stock && mode != Mode::AM)
    throw Error(ErrorCode::InvalidArgument, "raw stock must be additive");
  Primitive p;
  p.mode = mode;
  p.solid = solid;
  p.rate = rate;
  p.is_raw_stock = is_raw_stock;
  return p;
}

}  // namespace hpm
