#include "solid.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hpm {

namespace {

void require_compatible(const GridSpec& a, const GridSpec& b) {
  if (a != b)
    throw Error(ErrorCode::GridMismatch,
                "solids are not Boolean-compatible (grids differ)");
}

}  // namespace

VoxelSolid::VoxelSolid(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  words_.assign((std::uint64_t(grid_.cell_count()) + 63) / 64, 0);
}

std::int64_t VoxelSolid::popcount() const {
  std::int64_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

void VoxelSolid::fill() {
  for (auto& w : words_) w = ~std::uint64_t(0);
  mask_tail();
}

void VoxelSolid::clear() {
  for (auto& w : words_) w = 0;
}

void VoxelSolid::mask_tail() {
  std::int64_t n = grid_.cell_count();
  if (words_.empty()) return;
  unsigned rem = unsigned(n & 63);
  if (rem) words_.back() &= (std::uint64_t(1) << rem) - 1;
}

VoxelSolid unite(const VoxelSolid& a, const VoxelSolid& b) {
  require_compatible(a.grid_, b.grid_);
  VoxelSolid r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] |= b.words_[i];
  return r;
}

VoxelSolid intersect(const VoxelSolid& a, const VoxelSolid& b) {
  require_compatible(a.grid_, b.grid_);
  VoxelSolid r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= b.words_[i];
  return r;
}

VoxelSolid subtract(const VoxelSolid& a, const VoxelSolid& b) {
  require_compatible(a.grid_, b.grid_);
  VoxelSolid r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= ~b.words_[i];
  return r;
}

VoxelSolid complement(const VoxelSolid& a) {
  VoxelSolid r = a;
  for (auto& w : r.words_) w = ~w;
  r.mask_tail();
  return r;
}

bool is_subset(const VoxelSolid& a, const VoxelSolid& b) {
  require_compatible(a.grid(), b.grid());
  for (std::size_t i = 0; i < a.words().size(); ++i)
    if (a.words()[i] & ~b.words()[i]) return false;
  return true;
}

VoxelSolid reflect(const VoxelSolid& s) {
  const GridSpec& g = s.grid();
  auto R = g.reflect_constant();
  VoxelSolid r(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i) {
        if (!s.get(i, j, k)) continue;
        std::int64_t ri = R[0] - i, rj = R[1] - j, rk = R[2] - k;
        if (g.contains(ri, rj, rk)) r.set(ri, rj, rk);
      }
  return r;
}

VoxelSolid translated(const VoxelSolid& s, std::int64_t dx, std::int64_t dy,
                      std::int64_t dz) {
  const GridSpec& g = s.grid();
  VoxelSolid r(g);
  for (std::int64_t k = 0; k < g.nz; ++k)
    for (std::int64_t j = 0; j < g.ny; ++j)
      for (std::int64_t i = 0; i < g.nx; ++i) {
        if (!s.get(i, j, k)) continue;
        std::int64_t ti = i + dx, tj = j + dy, tk = k + dz;
        if (g.contains(ti, tj, tk)) r.set(ti, tj, tk);
      }
  return r;
}

namespace {

constexpr char kMagic[4] = {'H', 'P', 'V', 'X'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  // Assumes a little-endian host.
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw Error(ErrorCode::IoError, "truncated HPVX stream");
  return v;
}

}  // namespace

void write_solid(const VoxelSolid& s, std::ostream& out) {
  const GridSpec& g = s.grid();
  out.write(kMagic, 4);
  put<std::uint16_t>(out, kVersion);
  put<std::uint32_t>(out, std::uint32_t(g.nx));
  put<std::uint32_t>(out, std::uint32_t(g.ny));
  put<std::uint32_t>(out, std::uint32_t(g.nz));
  put<double>(out, g.spacing);
  for (double v : g.origin) put<double>(out, v);
  std::int64_t nbytes = (g.cell_count() + 7) / 8;
  const auto* raw = reinterpret_cast<const char*>(s.words().data());
  out.write(raw, nbytes);
  if (!out) throw Error(ErrorCode::IoError, "HPVX write failed");
}

VoxelSolid read_solid(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorCode::ParseError, "bad HPVX magic");
  std::uint16_t version = take<std::uint16_t>(in);
  if (version != kVersion)
    throw Error(ErrorCode::ParseError, "unsupported HPVX version");
  GridSpec g;
  g.nx = take<std::uint32_t>(in);
  g.ny = take<std::uint32_t>(in);
  g.nz = take<std::uint32_t>(in);
  g.spacing = take<double>(in);
  for (double& v : g.origin) v = take<double>(in);
  g.validate();
  VoxelSolid s(g);
  std::int64_t nbytes = (g.cell_count() + 7) / 8;
  std::vector<char> buf(nbytes);
  in.read(buf.data(), nbytes);
  if (!in) throw Error(ErrorCode::IoError, "truncated HPVX payload");
  std::memcpy(s.words().data(), buf.data(), nbytes);
  // Stray bits past cell_count in a foreign file must not leak in.
  unsigned rem = unsigned(g.cell_count() & 63);
  if (rem && !s.words().empty())
    s.words().back() &= (std::uint64_t(1) << rem) - 1;
  return s;
}

void save_solid(const VoxelSolid& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for write: " + path);
  write_solid(s, f);
}

VoxelSolid load_solid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for read: " + path);
  return read_solid(f);
}

}  // namespace hpm
