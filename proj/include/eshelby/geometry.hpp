#pragma once

#include "eshelby/common.hpp"
#include "eshelby/ellipsoid_potential.hpp"
#include "eshelby/region.hpp"

namespace eshelby {

// Positive per-axis scale factors d = (d1, d2, d3).
struct DiagonalStretch {
  Vec3 d = Vec3::Ones();
};

// Throws DomainError unless all factors are positive and finite.
void validate_stretch(const DiagonalStretch& s);

// Maps every voxel centre x' to diag(d)^-1 x'. The lattice maps onto itself
// exactly (spacing h/d_i, origin scaled alike), so no resampling error is
// introduced. Volume scales by 1/(d1 d2 d3).
VoxelRegion stretch_region(const VoxelRegion& region, const DiagonalStretch& stretch);

// Nearest-centre resampling of `region` onto a target lattice: a target
// voxel is occupied when the source voxel containing its centre, mapped by
// x -> diag(d) x, is occupied.
VoxelRegion resample_region(const VoxelRegion& region, const DiagonalStretch& stretch, const Vec3& origin,
                            const Vec3& spacing, const std::array<int, 3>& dims);

struct RegionStats {
  double volume = 0.0;
  Vec3 centroid = Vec3::Zero();
  Mat3 second_moment = Mat3::Zero();  // central, int (x-c)(x-c)^T dx over the voxel cells
  std::size_t voxels = 0;
};

// Throws DomainError for an empty region.
RegionStats region_stats(const VoxelRegion& region);

// Ellipsoid with the region's centroid, principal directions and volume,
// semi-axes from the exact uniform-ellipsoid moments (V a_i^2 / 5). The
// rotation has determinant +1 and columns ordered by increasing semi-axis.
// Throws DomainError for empty or planar regions.
EllipsoidPose ellipsoid_fit(const VoxelRegion& region);

// Fraction |R xor E| / |R| of voxels (on the region lattice, padded by two
// voxels) whose membership in R differs from membership of their centre in E.
double symmetric_difference_fraction(const VoxelRegion& region, const EllipsoidPose& pose);

}  // namespace eshelby
