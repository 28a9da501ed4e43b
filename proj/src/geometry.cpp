#include "eshelby/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace eshelby {

void validate_stretch(const DiagonalStretch& s) {
  for (int a = 0; a < 3; ++a)
    if (!(s.d[a] > 0.0) || !std::isfinite(s.d[a])) throw DomainError("stretch factors must be positive and finite");
}

VoxelRegion stretch_region(const VoxelRegion& region, const DiagonalStretch& stretch) {
  validate_stretch(stretch);
  VoxelRegion out = region;
  for (int a = 0; a < 3; ++a) {
    out.origin[a] = region.origin[a] / stretch.d[a];
    out.spacing[a] = region.spacing[a] / stretch.d[a];
  }
  return out;
}

VoxelRegion resample_region(const VoxelRegion& region, const DiagonalStretch& stretch, const Vec3& origin,
                            const Vec3& spacing, const std::array<int, 3>& dims) {
  validate_stretch(stretch);
  VoxelRegion out = make_region(origin, spacing, dims);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const Vec3 x = out.center(i, j, k).cwiseProduct(stretch.d);
        if (region.contains(x)) out.mask[out.index(i, j, k)] = 1;
      }
  return out;
}

RegionStats region_stats(const VoxelRegion& region) {
  const auto pts = region.centers();
  if (pts.empty()) throw DomainError("region statistics of an empty region");
  RegionStats s;
  s.voxels = pts.size();
  const double dv = region.voxel_volume();
  s.volume = static_cast<double>(pts.size()) * dv;
  Vec3 sum = Vec3::Zero();
  for (const auto& p : pts) sum += p;
  s.centroid = sum / static_cast<double>(pts.size());
  Mat3 m = Mat3::Zero();
  for (const auto& p : pts) {
    const Vec3 d = p - s.centroid;
    m += d * d.transpose();
  }
  // Each cell also carries its own moment h_a^2/12 about its centre.
  Mat3 self = Mat3::Zero();
  for (int a = 0; a < 3; ++a) self(a, a) = region.spacing[a] * region.spacing[a] / 12.0;
  s.second_moment = dv * m + s.volume * self;
  return s;
}

EllipsoidPose ellipsoid_fit(const VoxelRegion& region) {
  const RegionStats s = region_stats(region);
  Eigen::SelfAdjointEigenSolver<Mat3> es(s.second_moment);
  if (es.info() != Eigen::Success) throw DomainError("ellipsoid fit: moment eigen-decomposition failed");
  const Vec3 lambda = es.eigenvalues();  // ascending
  // A single voxel layer has only the self-moment along its normal.
  const double hmin = region.spacing.minCoeff();
  if (lambda[0] <= 1.5 * s.volume * hmin * hmin / 12.0)
    throw DomainError("ellipsoid fit: degenerate (planar) second moments");
  Vec3 a;
  for (int i = 0; i < 3; ++i) a[i] = std::sqrt(5.0 * lambda[i] / s.volume);
  // Rescale to the region's volume while keeping the moment ratios.
  const double scale = std::cbrt(s.volume / (4.0 / 3.0 * pi * a[0] * a[1] * a[2]));
  a *= scale;
  Mat3 Q = es.eigenvectors();
  if (Q.determinant() < 0.0) Q.col(2) = -Q.col(2);
  EllipsoidPose pose;
  pose.axes = EllipsoidAxes{a[0], a[1], a[2]};
  pose.rotation = Q;
  pose.translation = s.centroid;
  return pose;
}

double symmetric_difference_fraction(const VoxelRegion& region, const EllipsoidPose& pose) {
  const std::size_t nr = region.count();
  if (nr == 0) throw DomainError("symmetric difference of an empty region");
  // Scan a lattice padded to cover the ellipsoid as well.
  const double rmax = std::max({pose.axes.a1, pose.axes.a2, pose.axes.a3});
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    const double c = (pose.translation[a] - region.origin[a]) / region.spacing[a];
    const double ext = rmax / region.spacing[a];
    lo[a] = std::min(0, static_cast<int>(std::floor(c - ext)) - 2);
    hi[a] = std::max(region.dims[a] - 1, static_cast<int>(std::ceil(c + ext)) + 2);
  }
  std::size_t diff = 0;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const bool in_r = region.occupied(i, j, k);
        const bool in_e = pose.contains(region.center(i, j, k));
        if (in_r != in_e) ++diff;
      }
  return static_cast<double>(diff) / static_cast<double>(nr);
}

}  // namespace eshelby
