#pragma once

#include "eshelby/common.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eshelby {

// Occupancy mask on a uniform (possibly anisotropic) lattice. Voxel (i,j,k)
// is centred at origin + (i*sx, j*sy, k*sz) and has extent spacing.
struct VoxelRegion {
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();
  std::array<int, 3> dims{0, 0, 0};
  std::vector<std::uint8_t> mask;
  int component_count = -1;  // metadata; -1 when not computed

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }
  // Bounds-checked occupancy (false outside the lattice).
  bool occupied(int i, int j, int k) const { return in_bounds(i, j, k) && mask[index(i, j, k)] != 0; }
  Vec3 center(int i, int j, int k) const {
    return origin + Vec3(i * spacing[0], j * spacing[1], k * spacing[2]);
  }
  double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::array<int, 3>> occupied_indices() const;
  std::vector<Vec3> centers() const;
  // Index of the voxel whose cell contains x (may be out of bounds).
  std::array<int, 3> nearest_index(const Vec3& x) const;
  // True when x falls in an occupied voxel cell.
  bool contains(const Vec3& x) const;
  // Every voxel within `depth` cells (Chebyshev distance) of the voxel
  // containing x is occupied.
  bool interior_at_depth(const Vec3& x, int depth) const;
};

// Empty region with the given lattice. Throws DomainError on non-positive
// spacing or dimensions.
VoxelRegion make_region(const Vec3& origin, const Vec3& spacing, const std::array<int, 3>& dims);

// Voxelizes the box [lo, hi] with the given spacing (lattice symmetric about
// the box centre) and marks voxels whose centre satisfies `inside`.
VoxelRegion voxelize(const std::function<bool(const Vec3&)>& inside, const Vec3& lo, const Vec3& hi,
                     const Vec3& spacing);

bool same_occupancy(const VoxelRegion& a, const VoxelRegion& b);

// CSV voxel-centre lists. The writer emits "# spacing=", "# origin=" and
// "# dims=" comment lines followed by the header x,y,z; the reader accepts
// files without the comments and infers the lattice from the centres.
void write_region_csv(const std::string& path, const VoxelRegion& region);
VoxelRegion read_region_csv(const std::string& path);

}  // namespace eshelby
