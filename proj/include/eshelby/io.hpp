#pragma once

#include "eshelby/common.hpp"
#include "eshelby/fbsolver.hpp"
#include "eshelby/region.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace eshelby {

// Point data on a uniform lattice: the common in-memory form of the VTK and
// CSV volume exports. Values are stored x-fastest.
struct VolumeData {
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();
  std::array<int, 3> dims{0, 0, 0};
  std::vector<std::pair<std::string, std::vector<double>>> arrays;

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  }
  // Throws InputError for an unknown array name.
  const std::vector<double>& array(const std::string& name) const;
};

// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

VolumeData volume_from_fields(const Grid& grid, const std::vector<std::pair<std::string, const ScalarField*>>& fields);
// Adds the occupancy (0/1) of a region on the same lattice as `volume`.
// Throws InputError when the lattices differ.
void add_region_array(VolumeData& volume, const std::string& name, const VoxelRegion& region);

// Legacy-ASCII STRUCTURED_POINTS: DIMENSIONS, ORIGIN, SPACING, then one
// "SCALARS <name> double 1" block per array. Throws InputError on I/O or
// parse failure.
void write_vtk(const std::string& path, const VolumeData& volume);
VolumeData read_vtk(const std::string& path);

// CSV twin: "# dims=", "# origin=", "# spacing=" comment lines, header
// i,j,k,x,y,z,<array names...>, one row per lattice point.
void write_field_csv(const std::string& path, const VolumeData& volume);
VolumeData read_field_csv(const std::string& path);

// Dispatches on the extension (.vtk or .csv).
VolumeData read_volume(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace eshelby
