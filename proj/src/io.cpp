#include "eshelby/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace eshelby {

namespace {

double parse_double(const std::string& tok, const std::string& what) {
  // strtod rather than stod: stod rejects subnormal values, which must
  // survive a write/read round trip.
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str()) throw InputError(what + ": cannot parse number '" + tok + "'");
  if (errno == ERANGE && std::isinf(v)) throw InputError(what + ": number out of range '" + tok + "'");
  if (static_cast<std::size_t>(end - tok.c_str()) != tok.size())
    throw InputError(what + ": trailing characters in '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const std::string& what) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw InputError(what + ": cannot parse integer '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Vec3 parse_vec3(const std::vector<std::string>& tok, std::size_t first, const std::string& what) {
  if (tok.size() < first + 3) throw InputError(what + ": expected three numbers");
  return Vec3(parse_double(tok[first], what), parse_double(tok[first + 1], what), parse_double(tok[first + 2], what));
}

void check_volume(const VolumeData& v, const std::string& path) {
  for (int a = 0; a < 3; ++a)
    if (v.dims[a] <= 0) throw InputError(path + ": non-positive dimensions");
  for (const auto& [name, values] : v.arrays)
    if (values.size() != v.size()) throw InputError(path + ": array '" + name + "' has the wrong length");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

const std::vector<double>& VolumeData::array(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.first == name) return a.second;
  throw InputError("volume has no array named '" + name + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VolumeData volume_from_fields(const Grid& grid, const std::vector<std::pair<std::string, const ScalarField*>>& fields) {
  VolumeData v;
  v.origin = Vec3::Constant(-grid.L);
  v.spacing = Vec3::Constant(grid.h());
  v.dims = {grid.n, grid.n, grid.n};
  for (const auto& [name, f] : fields) {
    if (f->grid.n != grid.n || f->grid.L != grid.L) throw InputError("field '" + name + "' is on a different grid");
    v.arrays.emplace_back(name, f->values);
  }
  return v;
}

void add_region_array(VolumeData& volume, const std::string& name, const VoxelRegion& region) {
  if (region.dims != volume.dims || !region.origin.isApprox(volume.origin, 1e-12) ||
      !region.spacing.isApprox(volume.spacing, 1e-12))
    throw InputError("region '" + name + "' is not on the volume lattice");
  std::vector<double> m(region.mask.begin(), region.mask.end());
  volume.arrays.emplace_back(name, std::move(m));
}

void write_vtk(const std::string& path, const VolumeData& v) {
  check_volume(v, path);
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n"
      << "eshelby volume\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << v.dims[0] << ' ' << v.dims[1] << ' ' << v.dims[2] << '\n'
      << "ORIGIN " << format_double(v.origin[0]) << ' ' << format_double(v.origin[1]) << ' '
      << format_double(v.origin[2]) << '\n'
      << "SPACING " << format_double(v.spacing[0]) << ' ' << format_double(v.spacing[1]) << ' '
      << format_double(v.spacing[2]) << '\n'
      << "POINT_DATA " << v.size() << '\n';
  for (const auto& [name, values] : v.arrays) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << format_double(values[i]) << (i % 6 == 5 ? '\n' : ' ');
    if (values.size() % 6 != 0) out << '\n';
  }
  if (!out) throw InputError("write failed: '" + path + "'");
}

VolumeData read_vtk(const std::string& path) {
  std::ifstream in = open_in(path);
  VolumeData v;
  std::string line;
  bool have_dims = false, ascii = false, structured = false;
  std::size_t npoints = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "ASCII") {
      ascii = true;
    } else if (key == "BINARY") {
      throw InputError(path + ": binary VTK is not supported");
    } else if (key == "DATASET") {
      std::string type;
      ls >> type;
      structured = type == "STRUCTURED_POINTS";
      if (!structured) throw InputError(path + ": dataset '" + type + "' is not STRUCTURED_POINTS");
    } else if (key == "DIMENSIONS") {
      std::string a, b, c;
      ls >> a >> b >> c;
      v.dims = {parse_int(a, path), parse_int(b, path), parse_int(c, path)};
      have_dims = true;
    } else if (key == "ORIGIN" || key == "SPACING") {
      std::string a, b, c;
      ls >> a >> b >> c;
      const Vec3 x = parse_vec3({a, b, c}, 0, path);
      (key == "ORIGIN" ? v.origin : v.spacing) = x;
    } else if (key == "POINT_DATA") {
      std::string a;
      ls >> a;
      npoints = static_cast<std::size_t>(parse_int(a, path));
    } else if (key == "SCALARS") {
      std::string name;
      ls >> name;
      if (!have_dims || npoints != v.size()) throw InputError(path + ": SCALARS before consistent DIMENSIONS/POINT_DATA");
      std::vector<double> values;
      values.reserve(npoints);
      std::string tok;
      while (values.size() < npoints && in >> tok) {
        if (tok == "LOOKUP_TABLE") {
          in >> tok;
          continue;
        }
        values.push_back(parse_double(tok, path));
      }
      if (values.size() != npoints) throw InputError(path + ": array '" + name + "' is truncated");
      v.arrays.emplace_back(name, std::move(values));
    } else if (line.rfind("eshelby", 0) == 0 || !ascii) {
      continue;  // title line
    } else {
      throw InputError(path + ": unexpected line '" + line + "'");
    }
  }
  if (!ascii || !structured || !have_dims) throw InputError(path + ": not an ASCII STRUCTURED_POINTS file");
  check_volume(v, path);
  return v;
}

void write_field_csv(const std::string& path, const VolumeData& v) {
  check_volume(v, path);
  std::ofstream out = open_out(path);
  out << "# dims=" << v.dims[0] << ',' << v.dims[1] << ',' << v.dims[2] << '\n';
  out << "# origin=" << format_double(v.origin[0]) << ',' << format_double(v.origin[1]) << ','
      << format_double(v.origin[2]) << '\n';
  out << "# spacing=" << format_double(v.spacing[0]) << ',' << format_double(v.spacing[1]) << ','
      << format_double(v.spacing[2]) << '\n';
  out << "i,j,k,x,y,z";
  for (const auto& a : v.arrays) out << ',' << a.first;
  out << '\n';
  std::size_t c = 0;
  for (int k = 0; k < v.dims[2]; ++k)
    for (int j = 0; j < v.dims[1]; ++j)
      for (int i = 0; i < v.dims[0]; ++i, ++c) {
        const Vec3 x = v.origin + Vec3(i * v.spacing[0], j * v.spacing[1], k * v.spacing[2]);
        out << i << ',' << j << ',' << k << ',' << format_double(x[0]) << ',' << format_double(x[1]) << ','
            << format_double(x[2]);
        for (const auto& a : v.arrays) out << ',' << format_double(a.second[c]);
        out << '\n';
      }
  if (!out) throw InputError("write failed: '" + path + "'");
}

VolumeData read_field_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  VolumeData v;
  std::string line;
  bool have_dims = false, have_origin = false, have_spacing = false, have_header = false;
  std::vector<std::string> names;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const auto tok = split(line.substr(eq + 1), ',');
      if (key == "dims") {
        if (tok.size() != 3) throw InputError(path + ": dims needs three integers");
        v.dims = {parse_int(trim(tok[0]), path), parse_int(trim(tok[1]), path), parse_int(trim(tok[2]), path)};
        have_dims = true;
      } else if (key == "origin") {
        v.origin = parse_vec3(tok, 0, path);
        have_origin = true;
      } else if (key == "spacing") {
        v.spacing = parse_vec3(tok, 0, path);
        have_spacing = true;
      }
      continue;
    }
    if (!have_header) {
      const auto cols = split(line, ',');
      if (cols.size() < 6 || cols[0] != "i" || cols[1] != "j" || cols[2] != "k")
        throw InputError(path + ": expected header i,j,k,x,y,z,...");
      if (!have_dims || !have_origin || !have_spacing) throw InputError(path + ": missing lattice comment lines");
      for (std::size_t c = 6; c < cols.size(); ++c) {
        names.push_back(cols[c]);
        v.arrays.emplace_back(cols[c], std::vector<double>(v.size(), 0.0));
      }
      have_header = true;
      continue;
    }
    const auto tok = split(line, ',');
    if (tok.size() != 6 + names.size()) throw InputError(path + ": wrong column count in row " + std::to_string(row + 1));
    const int i = parse_int(tok[0], path), j = parse_int(tok[1], path), k = parse_int(tok[2], path);
    if (i < 0 || j < 0 || k < 0 || i >= v.dims[0] || j >= v.dims[1] || k >= v.dims[2])
      throw InputError(path + ": lattice index out of range in row " + std::to_string(row + 1));
    const std::size_t c = static_cast<std::size_t>(i) +
                          static_cast<std::size_t>(v.dims[0]) *
                              (static_cast<std::size_t>(j) + static_cast<std::size_t>(v.dims[1]) * k);
    for (std::size_t a = 0; a < names.size(); ++a) v.arrays[a].second[c] = parse_double(tok[6 + a], path);
    ++row;
  }
  if (!have_header) throw InputError(path + ": no header row");
  if (row != v.size()) throw InputError(path + ": expected " + std::to_string(v.size()) + " rows, found " + std::to_string(row));
  return v;
}

VolumeData read_volume(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "vtk") return read_vtk(path);
  if (ext == "csv") return read_field_csv(path);
  throw InputError("unknown volume format for '" + path + "' (expected .vtk or .csv)");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw InputError("write failed: '" + path + "'");
}

}  // namespace eshelby
