#include "hpm.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/pipeline.hpp"

using namespace hpm;

struct hpm_solid {
  VoxelSolid s;
};
struct hpm_field {
  OverlapField f;
};
struct hpm_decomp {
  Decomposition d;
};
struct hpm_plans {
  SearchResult r;
};

namespace {

thread_local std::string g_last_error;

hpm_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return HPM_OK;
    case ErrorCode::InvalidArgument: return HPM_INVALID_ARGUMENT;
    case ErrorCode::GridMismatch: return HPM_GRID_MISMATCH;
    case ErrorCode::ParseError: return HPM_PARSE_ERROR;
    case ErrorCode::IoError: return HPM_IO_ERROR;
    case ErrorCode::LimitExceeded: return HPM_LIMIT_EXCEEDED;
    case ErrorCode::NotReady: return HPM_NOT_READY;
    case ErrorCode::NotFound: return HPM_NOT_FOUND;
  }
  return HPM_INTERNAL;
}

template <typename F>
hpm_status guarded(F&& f) {
  try {
    f();
    return HPM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HPM_INTERNAL;
  }
}

hpm_status fail(hpm_status code, const char* msg) {
  g_last_error = msg;
  return code;
}

GridSpec to_grid(const hpm_grid& g) {
  GridSpec r;
  r.nx = g.nx;
  r.ny = g.ny;
  r.nz = g.nz;
  r.spacing = g.spacing;
  r.origin = {g.origin[0], g.origin[1], g.origin[2]};
  r.validate();
  return r;
}

hpm_grid from_grid(const GridSpec& g) {
  hpm_grid r;
  r.nx = g.nx;
  r.ny = g.ny;
  r.nz = g.nz;
  r.spacing = g.spacing;
  r.origin[0] = g.origin[0];
  r.origin[1] = g.origin[1];
  r.origin[2] = g.origin[2];
  return r;
}

CorrelateMethod to_method(int m) {
  if (m == HPM_METHOD_DIRECT) return CorrelateMethod::Direct;
  if (m == HPM_METHOD_FFT) return CorrelateMethod::Fft;
  throw Error(ErrorCode::InvalidArgument, "unknown correlation method");
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::uint64_t parse_code(const char* code, int n) {
  if (!code) throw Error(ErrorCode::InvalidArgument, "null atom code");
  std::string s(code);
  if (s.rfind("A_", 0) == 0) s = s.substr(2);
  if (int(s.size()) != n)
    throw Error(ErrorCode::InvalidArgument, "atom code length mismatch");
  std::uint64_t c = 0;
  for (char ch : s) {
    if (ch != '0' && ch != '1')
      throw Error(ErrorCode::ParseError, "atom code must be binary digits");
    c = c << 1 | std::uint64_t(ch == '1');
  }
  return c;
}

#define REQUIRE(p) \
  if (!(p)) return fail(HPM_INVALID_ARGUMENT, "null argument: " #p)

}  // namespace

extern "C" {

const char* hpm_last_error(void) { return g_last_error.c_str(); }

void hpm_string_free(char* s) { std::free(s); }

/* ---- solids ---------------------------------------------------------- */

hpm_status hpm_solid_create(const hpm_grid* grid, hpm_solid** out) {
  REQUIRE(grid);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{VoxelSolid(to_grid(*grid))}; });
}

void hpm_solid_destroy(hpm_solid* s) { delete s; }

hpm_status hpm_solid_clone(const hpm_solid* s, hpm_solid** out) {
  REQUIRE(s);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{s->s}; });
}

hpm_status hpm_solid_grid(const hpm_solid* s, hpm_grid* out) {
  REQUIRE(s);
  REQUIRE(out);
  *out = from_grid(s->s.grid());
  return HPM_OK;
}

hpm_status hpm_solid_get(const hpm_solid* s, int64_t x, int64_t y, int64_t z,
                         int* out) {
  REQUIRE(s);
  REQUIRE(out);
  return guarded([&] {
    if (!s->s.grid().contains(x, y, z))
      throw Error(ErrorCode::InvalidArgument, "voxel index out of range");
    *out = s->s.get(x, y, z) ? 1 : 0;
  });
}

hpm_status hpm_solid_set(hpm_solid* s, int64_t x, int64_t y, int64_t z,
                         int value) {
  REQUIRE(s);
  return guarded([&] {
    if (!s->s.grid().contains(x, y, z))
      throw Error(ErrorCode::InvalidArgument, "voxel index out of range");
    s->s.set(x, y, z, value != 0);
  });
}

hpm_status hpm_solid_popcount(const hpm_solid* s, int64_t* out) {
  REQUIRE(s);
  REQUIRE(out);
  *out = s->s.popcount();
  return HPM_OK;
}

hpm_status hpm_solid_measure(const hpm_solid* s, double* out) {
  REQUIRE(s);
  REQUIRE(out);
  *out = s->s.measure();
  return HPM_OK;
}

hpm_status hpm_solid_fill(hpm_solid* s) {
  REQUIRE(s);
  s->s.fill();
  return HPM_OK;
}

hpm_status hpm_solid_clear(hpm_solid* s) {
  REQUIRE(s);
  s->s.clear();
  return HPM_OK;
}

#define BINARY_OP(cname, op)                                           \
  hpm_status cname(const hpm_solid* a, const hpm_solid* b,             \
                   hpm_solid** out) {                                  \
    REQUIRE(a);                                                        \
    REQUIRE(b);                                                        \
    REQUIRE(out);                                                      \
    return guarded([&] { *out = new hpm_solid{op(a->s, b->s)}; });     \
  }

BINARY_OP(hpm_solid_unite, unite)
BINARY_OP(hpm_solid_intersect, intersect)
BINARY_OP(hpm_solid_subtract, subtract)

#undef BINARY_OP

hpm_status hpm_solid_complement(const hpm_solid* a, hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{complement(a->s)}; });
}

hpm_status hpm_solid_is_subset(const hpm_solid* a, const hpm_solid* b,
                               int* out) {
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] { *out = is_subset(a->s, b->s) ? 1 : 0; });
}

hpm_status hpm_solid_equal(const hpm_solid* a, const hpm_solid* b, int* out) {
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  *out = a->s == b->s ? 1 : 0;
  return HPM_OK;
}

hpm_status hpm_solid_reflect(const hpm_solid* a, hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{reflect(a->s)}; });
}

hpm_status hpm_solid_translate(const hpm_solid* a, int64_t dx, int64_t dy,
                               int64_t dz, hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{translated(a->s, dx, dy, dz)}; });
}

hpm_status hpm_solid_orient(const hpm_solid* a, int orientation,
                            hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{orient(a->s, orientation)}; });
}

hpm_status hpm_solid_load(const char* path, hpm_solid** out) {
  REQUIRE(path);
  REQUIRE(out);
  return guarded([&] { *out = new hpm_solid{load_solid(path)}; });
}

hpm_status hpm_solid_save(const hpm_solid* s, const char* path) {
  REQUIRE(s);
  REQUIRE(path);
  return guarded([&] { save_solid(s->s, path); });
}

hpm_status hpm_voxelize_scene(const char* scene_json, const hpm_grid* grid,
                              hpm_solid** out) {
  REQUIRE(scene_json);
  REQUIRE(grid);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_solid{voxelize(parse_scene_json(scene_json), to_grid(*grid))};
  });
}

/* ---- morphology ------------------------------------------------------ */

hpm_status hpm_correlate(const hpm_solid* a, const hpm_solid* b, int method,
                         hpm_field** out) {
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  return guarded(
      [&] { *out = new hpm_field{correlate(a->s, b->s, to_method(method))}; });
}

void hpm_field_destroy(hpm_field* f) { delete f; }

hpm_status hpm_field_at_offset(const hpm_field* f, int64_t dx, int64_t dy,
                               int64_t dz, uint32_t* out) {
  REQUIRE(f);
  REQUIRE(out);
  return guarded([&] { *out = f->f.at_offset(dx, dy, dz); });
}

hpm_status hpm_minkowski_sum(const hpm_solid* a, const hpm_solid* b,
                             int method, hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_solid{
        minkowski(a->s, MinkowskiOp::Sum, b->s, to_method(method))};
  });
}

hpm_status hpm_minkowski_difference(const hpm_solid* a, const hpm_solid* b,
                                    int method, hpm_solid** out) {
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_solid{
        minkowski(a->s, MinkowskiOp::Difference, b->s, to_method(method))};
  });
}

hpm_status hpm_opening(const hpm_solid* s, const hpm_solid* b,
                       const hpm_solid* c_or_null, int method,
                       hpm_solid** out) {
  REQUIRE(s);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    VoxelSolid c = c_or_null ? c_or_null->s : VoxelSolid(s->s.grid());
    *out = new hpm_solid{opening(s->s, b->s, c, to_method(method))};
  });
}

hpm_status hpm_closing(const hpm_solid* s, const hpm_solid* b,
                       const hpm_solid* c_or_null, int method,
                       hpm_solid** out) {
  REQUIRE(s);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    VoxelSolid c = c_or_null ? c_or_null->s : VoxelSolid(s->s.grid());
    *out = new hpm_solid{closing(s->s, b->s, c, to_method(method))};
  });
}

hpm_status hpm_offset_ball(const hpm_solid* s, double radius_mm, int grow,
                           hpm_solid** out) {
  REQUIRE(s);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_solid{offset_ball(
        s->s, radius_mm,
        grow ? OffsetDirection::Grow : OffsetDirection::Shrink)};
  });
}

hpm_status hpm_ball_element(const hpm_grid* grid, double radius_mm,
                            hpm_solid** out) {
  REQUIRE(grid);
  REQUIRE(out);
  return guarded(
      [&] { *out = new hpm_solid{ball_element(to_grid(*grid), radius_mm)}; });
}

hpm_status hpm_lambda_motion(const hpm_solid* obstacle, const hpm_solid* b,
                             double lambda, int method, hpm_solid** out) {
  REQUIRE(obstacle);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    TranslationSet t = lambda_motion(obstacle->s, b->s, b->s.popcount(), lambda,
                                     to_method(method));
    *out = new hpm_solid{std::move(t.members)};
  });
}

hpm_status hpm_sweep(const hpm_solid* motion_offsets, const hpm_solid* b,
                     hpm_solid** out) {
  REQUIRE(motion_offsets);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    if (motion_offsets->s.grid() != offset_grid(b->s.grid()))
      throw Error(ErrorCode::GridMismatch,
                  "motion set must live on the offset grid of the swept solid");
    TranslationSet t{motion_offsets->s};
    *out = new hpm_solid{dilate(t, b->s)};
  });
}

hpm_status hpm_revolve(const hpm_solid* s, int axis, double axis_x,
                       double axis_y, int samples, hpm_solid** out) {
  REQUIRE(s);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_solid{revolve(s->s, axis, {axis_x, axis_y}, samples)};
  });
}

/* ---- capabilities ---------------------------------------------------- */

hpm_status hpm_build_primitive(const char* variant, const hpm_solid* mmn,
                               const hpm_solid* assembly_or_null,
                               int orientation, double lambda, double rate,
                               const hpm_solid* target, int method,
                               hpm_solid** out_solid, int* out_mode) {
  REQUIRE(variant);
  REQUIRE(mmn);
  REQUIRE(target);
  REQUIRE(out_solid);
  return guarded([&] {
    auto v = variant_from_name(variant);
    if (!v)
      throw Error(ErrorCode::InvalidArgument,
                  std::string("unknown variant: ") + variant);
    Capability cap;
    cap.variant = *v;
    cap.mmn = mmn->s;
    cap.assembly =
        assembly_or_null ? assembly_or_null->s : VoxelSolid(mmn->s.grid());
    cap.orientation = orientation;
    cap.lambda = lambda;
    cap.rate = rate;
    Primitive p = build_primitive(cap, target->s, to_method(method));
    *out_solid = new hpm_solid{std::move(p.solid)};
    if (out_mode) *out_mode = p.mode == Mode::AM ? HPM_MODE_AM : HPM_MODE_SM;
  });
}

hpm_status hpm_raw_stock(const double box_min[3], const double box_max[3],
                         const hpm_grid* grid, hpm_solid** out) {
  REQUIRE(box_min);
  REQUIRE(box_max);
  REQUIRE(grid);
  REQUIRE(out);
  return guarded([&] {
    Primitive p = make_raw_stock({box_min[0], box_min[1], box_min[2]},
                                 {box_max[0], box_max[1], box_max[2]},
                                 to_grid(*grid), 1.0);
    *out = new hpm_solid{std::move(p.solid)};
  });
}

/* ---- decomposition --------------------------------------------------- */

hpm_status hpm_decomp_create(const hpm_grid* grid,
                             const hpm_solid* const* solids, const int* modes,
                             const double* rates, const int* raw_flags,
                             int count, hpm_decomp** out) {
  REQUIRE(grid);
  REQUIRE(solids);
  REQUIRE(modes);
  REQUIRE(rates);
  REQUIRE(out);
  if (count <= 0) return fail(HPM_INVALID_ARGUMENT, "count must be positive");
  return guarded([&] {
    std::vector<Primitive> prims;
    for (int i = 0; i < count; ++i) {
      if (!solids[i])
        throw Error(ErrorCode::InvalidArgument, "null primitive solid");
      Primitive p = primitive_from_solid(
          modes[i] == HPM_MODE_AM ? Mode::AM : Mode::SM, solids[i]->s,
          rates[i], raw_flags && raw_flags[i]);
      prims.push_back(std::move(p));
    }
    *out = new hpm_decomp{Decomposition(std::move(prims), to_grid(*grid))};
  });
}

void hpm_decomp_destroy(hpm_decomp* d) { delete d; }

hpm_status hpm_decomp_classify(const hpm_decomp* d, const hpm_solid* target,
                               double tolerance_mm, hpm_decomp** out) {
  REQUIRE(d);
  REQUIRE(target);
  REQUIRE(out);
  return guarded([&] {
    *out = new hpm_decomp{d->d.classify_target(target->s, tolerance_mm)};
  });
}

hpm_status hpm_decomp_refine(const hpm_decomp* d, const hpm_solid* solid,
                             int mode, double rate, hpm_decomp** out) {
  REQUIRE(d);
  REQUIRE(solid);
  REQUIRE(out);
  return guarded([&] {
    Primitive p = primitive_from_solid(
        mode == HPM_MODE_AM ? Mode::AM : Mode::SM, solid->s, rate);
    *out = new hpm_decomp{d->d.refine(p)};
  });
}

hpm_status hpm_decomp_atom_count(const hpm_decomp* d, int64_t* out) {
  REQUIRE(d);
  REQUIRE(out);
  *out = std::int64_t(d->d.atoms().size());
  return HPM_OK;
}

hpm_status hpm_decomp_csv(const hpm_decomp* d, char** out) {
  REQUIRE(d);
  REQUIRE(out);
  return guarded([&] { *out = dup_string(d->d.atoms_csv()); });
}

hpm_status hpm_decomp_test(const hpm_decomp* d, int* candidate,
                           char** violating) {
  REQUIRE(d);
  REQUIRE(candidate);
  return guarded([&] {
    auto r = d->d.manufacturability_test();
    *candidate = r.candidate ? 1 : 0;
    if (violating) {
      std::ostringstream s;
      for (std::uint64_t c : r.violating_codes)
        s << code_string(c, d->d.primitive_count()) << '\n';
      *violating = dup_string(s.str());
    }
  });
}

hpm_status hpm_decomp_atom_solid(const hpm_decomp* d, const char* code,
                                 hpm_solid** out) {
  REQUIRE(d);
  REQUIRE(out);
  return guarded([&] {
    std::uint64_t c = parse_code(code, d->d.primitive_count());
    *out = new hpm_solid{d->d.atom_solid(c)};
  });
}

hpm_status hpm_decomp_mask_solid(const hpm_decomp* d, hpm_solid** out) {
  REQUIRE(d);
  REQUIRE(out);
  return guarded([&] {
    if (!d->d.classified())
      throw Error(ErrorCode::NotReady, "decomposition is not classified");
    *out = new hpm_solid{d->d.mask_solid()};
  });
}

/* ---- planning -------------------------------------------------------- */

hpm_status hpm_plan_search(const hpm_decomp* classified, int k_best,
                           int max_depth, hpm_plans** out) {
  REQUIRE(classified);
  REQUIRE(out);
  return guarded([&] {
    SymbolicPlanner planner(classified->d);
    SearchOptions opt;
    opt.k_best = k_best;
    opt.max_depth = max_depth;
    *out = new hpm_plans{planner.search(opt)};
  });
}

void hpm_plans_destroy(hpm_plans* p) { delete p; }

hpm_status hpm_plans_count(const hpm_plans* p, int* out) {
  REQUIRE(p);
  REQUIRE(out);
  *out = int(p->r.plans.size());
  return HPM_OK;
}

namespace {
const Plan* plan_at(const hpm_plans* p, int index) {
  if (index < 0 || index >= int(p->r.plans.size()))
    throw Error(ErrorCode::InvalidArgument, "plan index out of range");
  return &p->r.plans[std::size_t(index)];
}
}  // namespace

hpm_status hpm_plans_cost(const hpm_plans* p, int index, double* out) {
  REQUIRE(p);
  REQUIRE(out);
  return guarded([&] { *out = plan_at(p, index)->cost; });
}

hpm_status hpm_plans_expression(const hpm_plans* p, int index, char** out) {
  REQUIRE(p);
  REQUIRE(out);
  return guarded(
      [&] { *out = dup_string(plan_at(p, index)->expression.to_string()); });
}

hpm_status hpm_plans_step_count(const hpm_plans* p, int index, int* out) {
  REQUIRE(p);
  REQUIRE(out);
  return guarded([&] { *out = int(plan_at(p, index)->steps.size()); });
}

hpm_status hpm_plans_step(const hpm_plans* p, int index, int step,
                          int* primitive_id, int* mode, double* volume,
                          double* cost) {
  REQUIRE(p);
  return guarded([&] {
    const Plan* plan = plan_at(p, index);
    if (step < 0 || step >= int(plan->steps.size()))
      throw Error(ErrorCode::InvalidArgument, "step index out of range");
    std::size_t i = std::size_t(step);
    if (primitive_id) *primitive_id = plan->steps[i].primitive_id;
    if (mode)
      *mode = plan->steps[i].mode == Mode::AM ? HPM_MODE_AM : HPM_MODE_SM;
    if (volume) *volume = plan->step_volumes[i];
    if (cost) *cost = plan->step_costs[i];
  });
}

hpm_status hpm_verify_expression(const hpm_decomp* classified,
                                 const char* expression, int* out_match) {
  REQUIRE(classified);
  REQUIRE(expression);
  REQUIRE(out_match);
  return guarded([&] {
    Expression e = parse_expression(expression);
    Plan plan;
    plan.steps = e.steps;
    plan.expression = e;
    *out_match = verify_plan_geometric(plan, classified->d) ? 1 : 0;
  });
}

hpm_status hpm_expressions_equivalent(const hpm_decomp* d, const char* a,
                                      const char* b, int scope, int* out) {
  REQUIRE(d);
  REQUIRE(a);
  REQUIRE(b);
  REQUIRE(out);
  return guarded([&] {
    if (scope != 0 && scope != 1)
      throw Error(ErrorCode::InvalidArgument,
                  "scope must be 0 (logical) or 1 (conditional)");
    Expression ea = parse_expression(a);
    Expression eb = parse_expression(b);
    EquivalenceScope s = scope == 0 ? EquivalenceScope::Logical
                                    : EquivalenceScope::Conditional;
    *out = equivalent(ea, eb, d->d, s) ? 1 : 0;
  });
}

/* ---- pipeline -------------------------------------------------------- */

hpm_status hpm_run_stage(const char* stage, const char* config_path,
                         const char* job_dir, int no_timestamp, int method,
                         int k_best, double tolerance_mm, int* exit_code,
                         char** log) {
  REQUIRE(stage);
  REQUIRE(config_path);
  REQUIRE(job_dir);
  REQUIRE(exit_code);
  return guarded([&] {
    JobConfig cfg = load_job_config(config_path);
    StageFlags flags;
    flags.no_timestamp = no_timestamp != 0;
    if (method >= 0) flags.method = to_method(method);
    if (k_best >= 0) flags.k_best = k_best;
    if (tolerance_mm >= 0) flags.tolerance_mm = tolerance_mm;
    std::string text;
    *exit_code = run_stage(stage, cfg, job_dir, flags, log ? &text : nullptr);
    if (log) *log = dup_string(text);
  });
}

}  // extern "C"
