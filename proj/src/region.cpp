#include "eshelby/region.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace eshelby {

std::size_t VoxelRegion::count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

std::vector<std::array<int, 3>> VoxelRegion::occupied_indices() const {
  std::vector<std::array<int, 3>> out;
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        if (mask[index(i, j, k)]) out.push_back({i, j, k});
  return out;
}

std::vector<Vec3> VoxelRegion::centers() const {
  std::vector<Vec3> out;
  for (const auto& ijk : occupied_indices()) out.push_back(center(ijk[0], ijk[1], ijk[2]));
  return out;
}

std::array<int, 3> VoxelRegion::nearest_index(const Vec3& x) const {
  std::array<int, 3> ijk{};
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - origin[a]) / spacing[a];
    const double r = std::floor(t + 0.5);
    // Clamp far-away points to just outside the lattice to avoid overflow.
    ijk[a] = static_cast<int>(std::clamp(r, -2.0, static_cast<double>(dims[a]) + 1.0));
  }
  return ijk;
}

bool VoxelRegion::contains(const Vec3& x) const {
  const auto ijk = nearest_index(x);
  return occupied(ijk[0], ijk[1], ijk[2]);
}

bool VoxelRegion::interior_at_depth(const Vec3& x, int depth) const {
  const auto c = nearest_index(x);
  for (int dk = -depth; dk <= depth; ++dk)
    for (int dj = -depth; dj <= depth; ++dj)
      for (int di = -depth; di <= depth; ++di)
        if (!occupied(c[0] + di, c[1] + dj, c[2] + dk)) return false;
  return true;
}

VoxelRegion make_region(const Vec3& origin, const Vec3& spacing, const std::array<int, 3>& dims) {
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw DomainError("voxel spacing must be positive");
    if (dims[a] <= 0) throw DomainError("voxel lattice dimensions must be positive");
  }
  VoxelRegion r;
  r.origin = origin;
  r.spacing = spacing;
  r.dims = dims;
  r.mask.assign(r.size(), 0);
  return r;
}

VoxelRegion voxelize(const std::function<bool(const Vec3&)>& inside, const Vec3& lo, const Vec3& hi,
                     const Vec3& spacing) {
  std::array<int, 3> dims{};
  Vec3 origin;
  for (int a = 0; a < 3; ++a) {
    if (!(hi[a] > lo[a])) throw DomainError("voxelize: empty bounding box");
    const int half = static_cast<int>(std::ceil(0.5 * (hi[a] - lo[a]) / spacing[a]));
    dims[a] = 2 * half + 1;
    origin[a] = 0.5 * (lo[a] + hi[a]) - half * spacing[a];
  }
  VoxelRegion r = make_region(origin, spacing, dims);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        if (inside(r.center(i, j, k))) r.mask[r.index(i, j, k)] = 1;
  return r;
}

bool same_occupancy(const VoxelRegion& a, const VoxelRegion& b) {
  // Compare by voxel centres so that regions on different bounding lattices
  // with identical occupied sets compare equal.
  const auto ca = a.centers();
  const auto cb = b.centers();
  if (ca.size() != cb.size()) return false;
  for (std::size_t n = 0; n < ca.size(); ++n) {
    for (int d = 0; d < 3; ++d) {
      const double tol = 1e-9 * std::max(a.spacing[d], b.spacing[d]);
      if (std::abs(ca[n][d] - cb[n][d]) > tol) return false;
    }
  }
  return true;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s, const std::string& path, int line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw InputError(path + ":" + std::to_string(line) + ": invalid number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

void write_region_csv(const std::string& path, const VoxelRegion& region) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open region file for writing: " + path);
  out << "# spacing=" << fmt17(region.spacing[0]) << "," << fmt17(region.spacing[1]) << ","
      << fmt17(region.spacing[2]) << "\n";
  out << "# origin=" << fmt17(region.origin[0]) << "," << fmt17(region.origin[1]) << "," << fmt17(region.origin[2])
      << "\n";
  out << "# dims=" << region.dims[0] << "," << region.dims[1] << "," << region.dims[2] << "\n";
  out << "x,y,z\n";
  for (const auto& c : region.centers()) out << fmt17(c[0]) << "," << fmt17(c[1]) << "," << fmt17(c[2]) << "\n";
  if (!out) throw InputError("failed writing region file: " + path);
}

VoxelRegion read_region_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open region file: " + path);
  std::vector<double> spacing, origin, dims;
  std::vector<Vec3> pts;
  bool header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq));
      const std::string val = body.substr(eq + 1);
      if (key == "spacing") spacing = parse_numbers(val, path, lineno);
      if (key == "origin") origin = parse_numbers(val, path, lineno);
      if (key == "dims") dims = parse_numbers(val, path, lineno);
      continue;
    }
    if (!header) {
      std::string h;
      for (char c : line)
        if (c != ' ') h += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (h != "x,y,z") throw InputError(path + ":" + std::to_string(lineno) + ": expected header x,y,z");
      header = true;
      continue;
    }
    const auto v = parse_numbers(line, path, lineno);
    if (v.size() != 3) throw InputError(path + ":" + std::to_string(lineno) + ": expected three columns");
    pts.emplace_back(v[0], v[1], v[2]);
  }
  if (!header) throw InputError(path + ": missing header x,y,z");
  if ((!spacing.empty() && spacing.size() != 3) || (!origin.empty() && origin.size() != 3) ||
      (!dims.empty() && dims.size() != 3))
    throw InputError(path + ": lattice comments need three values");

  Vec3 h, o;
  std::array<int, 3> d{};
  if (!spacing.empty() && !origin.empty() && !dims.empty()) {
    h = Vec3(spacing[0], spacing[1], spacing[2]);
    o = Vec3(origin[0], origin[1], origin[2]);
    for (int a = 0; a < 3; ++a) d[a] = static_cast<int>(dims[a]);
  } else {
    if (pts.empty()) throw InputError(path + ": region without voxels needs lattice comments");
    double fallback = std::numeric_limits<double>::infinity();
    Vec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
      std::vector<double> c;
      for (const auto& p : pts) c.push_back(p[a]);
      std::sort(c.begin(), c.end());
      lo[a] = c.front();
      hi[a] = c.back();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t n = 1; n < c.size(); ++n) {
        const double diff = c[n] - c[n - 1];
        if (diff > 1e-12 * std::max(1.0, std::abs(c[n]))) best = std::min(best, diff);
      }
      h[a] = best;
      fallback = std::min(fallback, best);
    }
    if (!spacing.empty()) h = Vec3(spacing[0], spacing[1], spacing[2]);
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(h[a])) h[a] = std::isfinite(fallback) ? fallback : 1.0;
      d[a] = static_cast<int>(std::llround((hi[a] - lo[a]) / h[a])) + 1;
    }
    o = lo;
  }
  VoxelRegion r = make_region(o, h, d);
  for (const auto& p : pts) {
    std::array<int, 3> ijk{};
    for (int a = 0; a < 3; ++a) {
      const double t = (p[a] - o[a]) / h[a];
      const double rt = std::round(t);
      if (std::abs(t - rt) > 1e-6) throw InputError(path + ": voxel centres are not on a uniform lattice");
      ijk[a] = static_cast<int>(rt);
    }
    if (!r.in_bounds(ijk[0], ijk[1], ijk[2])) throw InputError(path + ": voxel centre outside declared lattice");
    r.mask[r.index(ijk[0], ijk[1], ijk[2])] = 1;
  }
  return r;
}

}  // namespace eshelby
