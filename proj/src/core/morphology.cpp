#include "morphology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <fftw3.h>

namespace hpm {

namespace {

void require_compatible(const GridSpec& a, const GridSpec& b) {
  if (a != b)
    throw Error(ErrorCode::GridMismatch, "morphology: grids differ");
}

struct Dims {
  std::int64_t nx, ny, nz;
  std::int64_t count() const { return nx * ny * nz; }
  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return (k * ny + j) * nx + i;
  }
};

std::vector<std::array<std::int64_t, 3>> set_voxels(const VoxelSolid& s) {
  std::vector<std::array<std::int64_t, 3>> out;
  const GridSpec& g = s.grid();
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i)
        if (s.get(i, j, k)) out.push_back({i, j, k});
  return out;
}

std::mutex g_fftw_mutex;  // FFTW planner is not thread-safe

// Linear convolution counts c[u] = sum_v p[v] q[u-v] over 3D index space,
// output dims = pdims + qdims - 1 per axis. Exact integers on both paths.
std::vector<std::int64_t> convolve_counts(const VoxelSolid& p,
                                          const VoxelSolid& q,
                                          CorrelateMethod method, Dims& out) {
  const GridSpec& pg = p.grid();
  const GridSpec& qg = q.grid();
  out = {pg.nx + qg.nx - 1, pg.ny + qg.ny - 1, pg.nz + qg.nz - 1};
  if (out.count() > (std::int64_t(1) << 27))
    throw Error(ErrorCode::LimitExceeded,
                "grid too large for addressable FFT buffer");
  std::vector<std::int64_t> counts(out.count(), 0);

  if (method == CorrelateMethod::Direct) {
    auto pv = set_voxels(p);
    auto qv = set_voxels(q);
    for (const auto& a : pv)
      for (const auto& b : qv)
        ++counts[out.index(a[0] + b[0], a[1] + b[1], a[2] + b[2])];
    return counts;
  }

  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  std::int64_t n = out.count();
  std::int64_t nc = out.nz * out.ny * (out.nx / 2 + 1);
  double* pa = fftw_alloc_real(n);
  double* pb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(nc);
  fftw_complex* cb = fftw_alloc_complex(nc);
  std::fill(pa, pa + n, 0.0);
  std::fill(pb, pb + n, 0.0);
  for (std::int64_t k = 0; k < pg.nz; ++k)
    for (std::int64_t j = 0; j < pg.ny; ++j)
      for (std::int64_t i = 0; i < pg.nx; ++i)
        if (p.get(i, j, k)) pa[out.index(i, j, k)] = 1.0;
  for (std::int64_t k = 0; k < qg.nz; ++k)
    for (std::int64_t j = 0; j < qg.ny; ++j)
      for (std::int64_t i = 0; i < qg.nx; ++i)
        if (q.get(i, j, k)) pb[out.index(i, j, k)] = 1.0;

  fftw_plan fa = fftw_plan_dft_r2c_3d(int(out.nz), int(out.ny), int(out.nx),
                                      pa, ca, FFTW_ESTIMATE);
  fftw_execute(fa);
  fftw_plan fb = fftw_plan_dft_r2c_3d(int(out.nz), int(out.ny), int(out.nx),
                                      pb, cb, FFTW_ESTIMATE);
  fftw_execute(fb);
  for (std::int64_t i = 0; i < nc; ++i) {
    double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
    double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_plan fi = fftw_plan_dft_c2r_3d(int(out.nz), int(out.ny), int(out.nx),
                                      ca, pa, FFTW_ESTIMATE);
  fftw_execute(fi);
  double scale = 1.0 / double(n);
  for (std::int64_t i = 0; i < n; ++i)
    counts[i] = std::max<std::int64_t>(0, std::llround(pa[i] * scale));
  fftw_destroy_plan(fa);
  fftw_destroy_plan(fb);
  fftw_destroy_plan(fi);
  fftw_free(pa);
  fftw_free(pb);
  fftw_free(ca);
  fftw_free(cb);
  return counts;
}

// Array reversal per axis (pure index flip, no world semantics).
VoxelSolid reversed_array(const VoxelSolid& s) {
  const GridSpec& g = s.grid();
  VoxelSolid r(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i)
        if (s.get(i, j, k))
          r.set(g.nx - 1 - i, g.ny - 1 - j, g.nz - 1 - k);
  return r;
}

}  // namespace

GridSpec offset_grid(const GridSpec& workspace) {
  GridSpec g;
  g.nx = 2 * workspace.nx - 1;
  g.ny = 2 * workspace.ny - 1;
  g.nz = 2 * workspace.nz - 1;
  g.spacing = workspace.spacing;
  g.origin = {-(double(workspace.nx - 1) + 0.5) * g.spacing,
              -(double(workspace.ny - 1) + 0.5) * g.spacing,
              -(double(workspace.nz - 1) + 0.5) * g.spacing};
  return g;
}

TranslationSet empty_translation_set(const GridSpec& workspace) {
  return TranslationSet{VoxelSolid(offset_grid(workspace))};
}

std::uint32_t OverlapField::at_offset(std::int64_t tx, std::int64_t ty,
                                      std::int64_t tz) const {
  auto c = center();
  std::int64_t i = c[0] + tx, j = c[1] + ty, k = c[2] + tz;
  if (!grid.contains(i, j, k)) return 0;
  return counts[grid.index(i, j, k)];
}

bool TranslationSet::has_offset(std::int64_t tx, std::int64_t ty,
                                std::int64_t tz) const {
  const GridSpec& g = members.grid();
  std::int64_t i = g.nx / 2 + tx, j = g.ny / 2 + ty, k = g.nz / 2 + tz;
  return g.contains(i, j, k) && members.get(i, j, k);
}

void TranslationSet::set_offset(std::int64_t tx, std::int64_t ty,
                                std::int64_t tz) {
  const GridSpec& g = members.grid();
  members.set(g.nx / 2 + tx, g.ny / 2 + ty, g.nz / 2 + tz);
}

TranslationSet TranslationSet::negated() const {
  return TranslationSet{reversed_array(members)};
}

OverlapField correlate(const VoxelSolid& a, const VoxelSolid& b,
                       CorrelateMethod method) {
  require_compatible(a.grid(), b.grid());
  // corr(a,b)[tau] = conv(a, rev(b))[tau + (n-1)], which is exactly the
  // offset-grid layout.
  Dims d;
  auto counts = convolve_counts(a, reversed_array(b), method, d);
  OverlapField f;
  f.grid = offset_grid(a.grid());
  f.counts.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    f.counts[i] = std::uint32_t(counts[i]);
  return f;
}

TranslationSet obstacle(const VoxelSolid& s, const VoxelSolid& d,
                        CorrelateMethod method) {
  OverlapField f = correlate(s, d, method);
  TranslationSet t{VoxelSolid(f.grid)};
  for (std::int64_t i = 0; i < f.grid.cell_count(); ++i)
    if (f.counts[i] >= 1) t.members.set_linear(i);
  return t;
}

TranslationSet free_space(const VoxelSolid& s, const VoxelSolid& d,
                          CorrelateMethod method) {
  TranslationSet t = obstacle(s, d, method);
  t.members = complement(t.members);
  return t;
}

TranslationSet lambda_motion(const VoxelSolid& target_complement,
                             const VoxelSolid& d, std::int64_t mmn_volume,
                             double lambda, CorrelateMethod method) {
  if (!(lambda >= 0.0) || lambda >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "lambda must be in [0,1)");
  if (mmn_volume <= 0)
    throw Error(ErrorCode::InvalidArgument, "mmn_volume must be positive");
  OverlapField f = correlate(target_complement, d, method);
  double threshold = lambda * double(mmn_volume);
  TranslationSet t{VoxelSolid(f.grid)};
  for (std::int64_t i = 0; i < f.grid.cell_count(); ++i)
    if (double(f.counts[i]) <= threshold) t.members.set_linear(i);
  return t;
}

VoxelSolid dilate(const TranslationSet& t, const VoxelSolid& b) {
  const GridSpec& g = b.grid();
  if (offset_grid(g) != t.grid())
    throw Error(ErrorCode::GridMismatch,
                "translation set does not match shape grid");
  Dims d;
  auto counts = convolve_counts(t.members, b, CorrelateMethod::Fft, d);
  // result[x] = sum_tau t[tau] b[x - tau] lives at conv index x + (n-1).
  VoxelSolid r(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i)
        if (counts[d.index(i + g.nx - 1, j + g.ny - 1, k + g.nz - 1)] >= 1)
          r.set(i, j, k);
  return r;
}

VoxelSolid erode(const TranslationSet& t, const VoxelSolid& b) {
  const GridSpec& g = b.grid();
  if (offset_grid(g) != t.grid())
    throw Error(ErrorCode::GridMismatch,
                "translation set does not match shape grid");
  std::int64_t m = t.members.popcount();
  VoxelSolid r(g);
  if (m == 0) {
    r.fill();  // intersection over the empty motion set is the universe
    return r;
  }
  Dims d;
  auto counts = convolve_counts(t.members, b, CorrelateMethod::Fft, d);
  // Offsets that push a probe position outside the grid are treated as
  // occupied (padding with material), the adjoint convention to dilation's
  // zero padding: count in-grid probes instead of assuming all m land inside.
  VoxelSolid ones(g);
  ones.fill();
  Dims d1;
  auto in_grid = convolve_counts(t.members, ones, CorrelateMethod::Fft, d1);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i) {
        std::int64_t ci = d.index(i + g.nx - 1, j + g.ny - 1, k + g.nz - 1);
        if (counts[ci] == in_grid[ci]) r.set(i, j, k);
      }
  return r;
}

namespace {

// Shared threshold kernel: result[x] tests counts at x against either a
// lower bound of one occupied probe (Sum) or containment of every in-grid
// probe (Difference, with probes leaving the grid counting as satisfied).
VoxelSolid threshold_counts(const GridSpec& g, MinkowskiOp op, const Dims& d,
                            const std::vector<std::int64_t>& counts,
                            const std::vector<std::int64_t>& in_grid,
                            std::array<std::int64_t, 3> shift) {
  VoxelSolid r(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i) {
        std::int64_t u = i + shift[0], v = j + shift[1], w = k + shift[2];
        if (u < 0 || u >= d.nx || v < 0 || v >= d.ny || w < 0 || w >= d.nz) {
          if (op == MinkowskiOp::Difference) r.set(i, j, k);  // vacuous
          continue;
        }
        std::int64_t ci = d.index(u, v, w);
        bool on = op == MinkowskiOp::Sum ? counts[ci] >= 1
                                         : counts[ci] == in_grid[ci];
        if (on) r.set(i, j, k);
      }
  return r;
}

std::vector<std::int64_t> ones_counts(const GridSpec& g, const VoxelSolid& b,
                                      CorrelateMethod method, Dims& d) {
  VoxelSolid ones(g);
  ones.fill();
  return convolve_counts(ones, b, method, d);
}

}  // namespace

VoxelSolid minkowski(const VoxelSolid& a, MinkowskiOp op, const VoxelSolid& b,
                     CorrelateMethod method) {
  require_compatible(a.grid(), b.grid());
  const GridSpec& g = a.grid();
  auto c = g.anchor();
  VoxelSolid r(g);
  if (b.empty()) {
    if (op == MinkowskiOp::Difference) r.fill();  // vacuous containment
    return r;
  }
  Dims d;
  auto counts = convolve_counts(a, b, method, d);
  std::vector<std::int64_t> in_grid;
  if (op == MinkowskiOp::Difference) {
    Dims d1;
    in_grid = ones_counts(g, b, method, d1);
  }
  return threshold_counts(g, op, d, counts, in_grid, c);
}

VoxelSolid minkowski_reflected(const VoxelSolid& a, MinkowskiOp op,
                               const VoxelSolid& b, CorrelateMethod method) {
  require_compatible(a.grid(), b.grid());
  const GridSpec& g = a.grid();
  auto c = g.anchor();
  VoxelSolid r(g);
  if (b.empty()) {
    if (op == MinkowskiOp::Difference) r.fill();
    return r;
  }
  // conv(a, rev(b)) at x + (n-1) - c counts occupied probes a[x + u - c] over
  // u in b: the reflection enters as an array reversal, losing nothing to
  // grid clipping.
  VoxelSolid rb = reversed_array(b);
  Dims d;
  auto counts = convolve_counts(a, rb, method, d);
  std::vector<std::int64_t> in_grid;
  if (op == MinkowskiOp::Difference) {
    Dims d1;
    in_grid = ones_counts(g, rb, method, d1);
  }
  return threshold_counts(g, op, d, counts, in_grid,
                          {g.nx - 1 - c[0], g.ny - 1 - c[1], g.nz - 1 - c[2]});
}

VoxelSolid opening(const VoxelSolid& s, const VoxelSolid& b,
                   const VoxelSolid& c, CorrelateMethod method) {
  VoxelSolid instrument = unite(b, c);
  VoxelSolid eroded =
      minkowski_reflected(s, MinkowskiOp::Difference, instrument, method);
  return minkowski(eroded, MinkowskiOp::Sum, b, method);
}

VoxelSolid closing(const VoxelSolid& s, const VoxelSolid& b,
                   const VoxelSolid& c, CorrelateMethod method) {
  VoxelSolid instrument = unite(b, c);
  VoxelSolid dilated =
      minkowski_reflected(s, MinkowskiOp::Sum, instrument, method);
  return minkowski(dilated, MinkowskiOp::Difference, b, method);
}

VoxelSolid ball_element(const GridSpec& grid, double r) {
  if (!(r >= 0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  auto c = grid.anchor();
  VoxelSolid b(grid);
  std::int64_t rv = std::int64_t(std::floor(r / grid.spacing));
  for (std::int64_t dz = -rv; dz <= rv; ++dz)
    for (std::int64_t dy = -rv; dy <= rv; ++dy)
      for (std::int64_t dx = -rv; dx <= rv; ++dx) {
        double dist = std::sqrt(double(dx * dx + dy * dy + dz * dz)) *
                      grid.spacing;
        if (dist > r) continue;
        std::int64_t i = c[0] + dx, j = c[1] + dy, k = c[2] + dz;
        if (grid.contains(i, j, k)) b.set(i, j, k);
      }
  if (grid.contains(c[0], c[1], c[2])) b.set(c[0], c[1], c[2]);
  return b;
}

VoxelSolid offset_ball(const VoxelSolid& s, double r, OffsetDirection dir,
                       CorrelateMethod method) {
  VoxelSolid ball = ball_element(s.grid(), r);
  return minkowski(
      s, dir == OffsetDirection::Grow ? MinkowskiOp::Sum : MinkowskiOp::Difference,
      ball, method);
}

VoxelSolid revolve(const VoxelSolid& b, int axis, std::array<double, 2> axis_pos,
                   int angular_samples) {
  if (axis < 0 || axis > 2)
    throw Error(ErrorCode::InvalidArgument, "revolve axis must be 0, 1 or 2");
  if (angular_samples < 4)
    throw Error(ErrorCode::InvalidArgument, "angular_samples must be >= 4");
  const GridSpec& g = b.grid();
  int u = (axis + 1) % 3, v = (axis + 2) % 3;
  std::array<double, 3> lo = g.origin;
  std::array<double, 3> hi = {g.origin[0] + g.nx * g.spacing,
                              g.origin[1] + g.ny * g.spacing,
                              g.origin[2] + g.nz * g.spacing};
  if (axis_pos[0] < lo[u] || axis_pos[0] > hi[u] || axis_pos[1] < lo[v] ||
      axis_pos[1] > hi[v])
    throw Error(ErrorCode::InvalidArgument, "revolve axis outside grid");

  VoxelSolid r(g);
  auto voxels = set_voxels(b);
  std::array<std::int64_t, 3> n = {g.nx, g.ny, g.nz};
  for (int s = 0; s < angular_samples; ++s) {
    double theta = 2.0 * M_PI * double(s) / double(angular_samples);
    double ct = std::cos(theta), st = std::sin(theta);
    for (const auto& vx : voxels) {
      auto p = g.center(vx[0], vx[1], vx[2]);
      double du = p[u] - axis_pos[0], dv = p[v] - axis_pos[1];
      double ru = du * ct - dv * st, rv2 = du * st + dv * ct;
      std::array<double, 3> q = p;
      q[u] = axis_pos[0] + ru;
      q[v] = axis_pos[1] + rv2;
      std::array<std::int64_t, 3> idx;
      bool ok = true;
      for (int ax = 0; ax < 3; ++ax) {
        idx[ax] = std::llround((q[ax] - g.origin[ax]) / g.spacing - 0.5);
        if (idx[ax] < 0 || idx[ax] >= n[ax]) ok = false;
      }
      if (ok) r.set(idx[0], idx[1], idx[2]);
    }
  }
  return r;
}

void save_field(const OverlapField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open for write: " + path);
  const char magic[4] = {'H', 'P', 'V', 'F'};
  out.write(magic, 4);
  std::uint16_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 2);
  std::uint32_t dims[3] = {std::uint32_t(f.grid.nx), std::uint32_t(f.grid.ny),
                           std::uint32_t(f.grid.nz)};
  out.write(reinterpret_cast<const char*>(dims), 12);
  out.write(reinterpret_cast<const char*>(&f.grid.spacing), 8);
  out.write(reinterpret_cast<const char*>(f.grid.origin.data()), 24);
  out.write(reinterpret_cast<const char*>(f.counts.data()),
            std::streamsize(f.counts.size() * 4));
  if (!out) throw Error(ErrorCode::IoError, "field write failed");
}

}  // namespace hpm
