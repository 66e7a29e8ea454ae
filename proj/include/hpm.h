/* hpm: hybrid additive/subtractive process-planning engine, C interface.
 *
 * All functions return hpm_status (HPM_OK on success). On failure the
 * thread-local message from hpm_last_error() describes the problem. Objects
 * are opaque handles owned by the caller and released with the matching
 * *_destroy function. Strings returned through char** are heap-allocated and
 * must be released with hpm_string_free.
 */
#ifndef HPM_H
#define HPM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t hpm_status;

enum {
  HPM_OK = 0,
  HPM_INVALID_ARGUMENT = 1,
  HPM_GRID_MISMATCH = 2,
  HPM_PARSE_ERROR = 3,
  HPM_IO_ERROR = 4,
  HPM_LIMIT_EXCEEDED = 5,
  HPM_NOT_READY = 6,
  HPM_NOT_FOUND = 7,
  HPM_INTERNAL = 100
};

/* Correlation backends. */
enum { HPM_METHOD_DIRECT = 0, HPM_METHOD_FFT = 1 };

/* Manufacturing modes. */
enum { HPM_MODE_AM = 0, HPM_MODE_SM = 1 };

typedef struct hpm_grid {
  int64_t nx, ny, nz;
  double spacing;
  double origin[3];
} hpm_grid;

typedef struct hpm_solid hpm_solid;
typedef struct hpm_field hpm_field; /* voxel-count overlap field */
typedef struct hpm_decomp hpm_decomp;
typedef struct hpm_plans hpm_plans;

const char* hpm_last_error(void);
void hpm_string_free(char* s);

/* ---- solids ---------------------------------------------------------- */

hpm_status hpm_solid_create(const hpm_grid* grid, hpm_solid** out);
void hpm_solid_destroy(hpm_solid* s);
hpm_status hpm_solid_clone(const hpm_solid* s, hpm_solid** out);
hpm_status hpm_solid_grid(const hpm_solid* s, hpm_grid* out);
hpm_status hpm_solid_get(const hpm_solid* s, int64_t x, int64_t y, int64_t z,
                         int* out);
hpm_status hpm_solid_set(hpm_solid* s, int64_t x, int64_t y, int64_t z,
                         int value);
hpm_status hpm_solid_popcount(const hpm_solid* s, int64_t* out);
hpm_status hpm_solid_measure(const hpm_solid* s, double* out);
hpm_status hpm_solid_fill(hpm_solid* s);
hpm_status hpm_solid_clear(hpm_solid* s);

/* c = a (op) b; grids must match. */
hpm_status hpm_solid_unite(const hpm_solid* a, const hpm_solid* b,
                           hpm_solid** out);
hpm_status hpm_solid_intersect(const hpm_solid* a, const hpm_solid* b,
                               hpm_solid** out);
hpm_status hpm_solid_subtract(const hpm_solid* a, const hpm_solid* b,
                              hpm_solid** out);
hpm_status hpm_solid_complement(const hpm_solid* a, hpm_solid** out);
hpm_status hpm_solid_is_subset(const hpm_solid* a, const hpm_solid* b,
                               int* out);
hpm_status hpm_solid_equal(const hpm_solid* a, const hpm_solid* b, int* out);
hpm_status hpm_solid_reflect(const hpm_solid* a, hpm_solid** out);
hpm_status hpm_solid_translate(const hpm_solid* a, int64_t dx, int64_t dy,
                               int64_t dz, hpm_solid** out);
/* One of the 24 axis-aligned rotations about the world origin. */
hpm_status hpm_solid_orient(const hpm_solid* a, int orientation,
                            hpm_solid** out);

hpm_status hpm_solid_load(const char* path, hpm_solid** out);
hpm_status hpm_solid_save(const hpm_solid* s, const char* path);

/* Voxelize a JSON CSG scene onto a grid (voxel-center classification). */
hpm_status hpm_voxelize_scene(const char* scene_json, const hpm_grid* grid,
                              hpm_solid** out);

/* ---- morphology ------------------------------------------------------ */

/* Cross-correlation counts of a against b over all integer offsets. */
hpm_status hpm_correlate(const hpm_solid* a, const hpm_solid* b, int method,
                         hpm_field** out);
void hpm_field_destroy(hpm_field* f);
hpm_status hpm_field_at_offset(const hpm_field* f, int64_t dx, int64_t dy,
                               int64_t dz, uint32_t* out);

hpm_status hpm_minkowski_sum(const hpm_solid* a, const hpm_solid* b,
                             int method, hpm_solid** out);
hpm_status hpm_minkowski_difference(const hpm_solid* a, const hpm_solid* b,
                                    int method, hpm_solid** out);
hpm_status hpm_opening(const hpm_solid* s, const hpm_solid* b,
                       const hpm_solid* c_or_null, int method,
                       hpm_solid** out);
hpm_status hpm_closing(const hpm_solid* s, const hpm_solid* b,
                       const hpm_solid* c_or_null, int method,
                       hpm_solid** out);
hpm_status hpm_offset_ball(const hpm_solid* s, double radius_mm, int grow,
                           hpm_solid** out);
hpm_status hpm_ball_element(const hpm_grid* grid, double radius_mm,
                            hpm_solid** out);
/* Motion set with at most lambda * |b| interfering voxels against obstacle. */
hpm_status hpm_lambda_motion(const hpm_solid* obstacle, const hpm_solid* b,
                             double lambda, int method, hpm_solid** out);
/* Sweep of b over the offsets contained in motion (a translation-set solid on
 * the offset grid of correlate results). */
hpm_status hpm_sweep(const hpm_solid* motion_offsets, const hpm_solid* b,
                     hpm_solid** out);
hpm_status hpm_revolve(const hpm_solid* s, int axis, double axis_x,
                       double axis_y, int samples, hpm_solid** out);

/* ---- capabilities ---------------------------------------------------- */

/* variant: "maximal_under_fill", "over_fill_lambda", "conservative_over_fill",
 * "maximal_over_cut", "conservative_under_cut". */
hpm_status hpm_build_primitive(const char* variant, const hpm_solid* mmn,
                               const hpm_solid* assembly_or_null,
                               int orientation, double lambda, double rate,
                               const hpm_solid* target, int method,
                               hpm_solid** out_solid, int* out_mode);
hpm_status hpm_raw_stock(const double box_min[3], const double box_max[3],
                         const hpm_grid* grid, hpm_solid** out);

/* ---- decomposition --------------------------------------------------- */

hpm_status hpm_decomp_create(const hpm_grid* grid, const hpm_solid* const* solids,
                             const int* modes, const double* rates,
                             const int* raw_flags, int count,
                             hpm_decomp** out);
void hpm_decomp_destroy(hpm_decomp* d);
hpm_status hpm_decomp_classify(const hpm_decomp* d, const hpm_solid* target,
                               double tolerance_mm, hpm_decomp** out);
hpm_status hpm_decomp_refine(const hpm_decomp* d, const hpm_solid* solid,
                             int mode, double rate, hpm_decomp** out);
hpm_status hpm_decomp_atom_count(const hpm_decomp* d, int64_t* out);
hpm_status hpm_decomp_csv(const hpm_decomp* d, char** out);
/* Decisive only for non-manufacturability; candidate=1 means "may be
 * manufacturable". violating (may be NULL) receives a newline-separated list
 * of violating atom code strings. */
hpm_status hpm_decomp_test(const hpm_decomp* d, int* candidate,
                           char** violating);
hpm_status hpm_decomp_atom_solid(const hpm_decomp* d, const char* code,
                                 hpm_solid** out);
hpm_status hpm_decomp_mask_solid(const hpm_decomp* d, hpm_solid** out);

/* ---- planning -------------------------------------------------------- */

hpm_status hpm_plan_search(const hpm_decomp* classified, int k_best,
                           int max_depth, hpm_plans** out);
void hpm_plans_destroy(hpm_plans* p);
hpm_status hpm_plans_count(const hpm_plans* p, int* out);
hpm_status hpm_plans_cost(const hpm_plans* p, int index, double* out);
hpm_status hpm_plans_expression(const hpm_plans* p, int index, char** out);
hpm_status hpm_plans_step_count(const hpm_plans* p, int index, int* out);
hpm_status hpm_plans_step(const hpm_plans* p, int index, int step,
                          int* primitive_id, int* mode, double* volume,
                          double* cost);

/* Evaluate an expression string ("(((P1 ∪ P2) ∩ ~P3) ∩ ~P4)"; ASCII U/^ also
 * accepted) with voxel Booleans and compare against the target mask. */
hpm_status hpm_verify_expression(const hpm_decomp* classified,
                                 const char* expression, int* out_match);
/* scope: 0 = logical (all atom codes), 1 = conditional (nonempty atoms). */
hpm_status hpm_expressions_equivalent(const hpm_decomp* d, const char* a,
                                      const char* b, int scope, int* out);

/* ---- pipeline -------------------------------------------------------- */

/* Runs one stage of the job pipeline. method < 0, k_best < 0, tolerance < 0
 * mean "use the config value". Returns HPM_OK even when the stage's business
 * result is negative; *exit_code carries the stage status (0 success). log
 * (may be NULL) receives the human-readable stage log. */
hpm_status hpm_run_stage(const char* stage, const char* config_path,
                         const char* job_dir, int no_timestamp, int method,
                         int k_best, double tolerance_mm, int* exit_code,
                         char** log);

#ifdef __cplusplus
}
#endif

#endif /* HPM_H */
