#pragma once

#include "eshelby/common.hpp"
#include "eshelby/kernels.hpp"
#include "eshelby/region.hpp"

#include <functional>
#include <vector>

namespace eshelby {

// Exact volume integral over the box [lo, hi] of 1/|x - y| dy (closed-form
// prism formula, valid inside, on and outside the box).
double box_inverse_distance(const Vec3& lo, const Vec3& hi, const Vec3& x);
// Gradient with respect to x of box_inverse_distance.
Vec3 box_inverse_distance_gradient(const Vec3& lo, const Vec3& hi, const Vec3& x);

// Weighted inverse-distance integrals over a voxel region,
//   I(x) = sum_v q_v * int_{cell v} 1 / R(x - y) dy,
//   R(d) = sqrt(d1^2 + d2^2 + m3 d3^2),
// with q_v the density sampled at the voxel centre. Cells within `near`
// lattice steps of x are integrated exactly; all others are treated as point
// masses and summed with the dispatched SIMD kernel.
class VoxelIntegrator {
 public:
  VoxelIntegrator(const VoxelRegion& region, const std::function<double(const Vec3&)>& density, double m3 = 1.0,
                  int near = 1);

  double integral(const Vec3& x) const;
  Vec3 integral_gradient(const Vec3& x) const;

  // Newtonian potential N = -(1/4pi) I and its gradient (m3 = 1 convention).
  double newtonian(const Vec3& x) const { return -integral(x) / (4.0 * pi); }
  Vec3 newtonian_gradient(const Vec3& x) const { return -integral_gradient(x) / (4.0 * pi); }

  const VoxelRegion& region() const { return region_; }
  double metric() const { return m3_; }
  std::size_t source_count() const { return cloud_.size(); }

 private:
  // x, or the voxel centre it lies within 1e-7 cells of.
  Vec3 snap(const Vec3& x) const;
  // Exact cell integral of 1/R for the cell centred at c.
  double cell_integral(const Vec3& c, const Vec3& x) const;
  Vec3 cell_gradient(const Vec3& c, const Vec3& x) const;

  VoxelRegion region_;
  std::vector<double> weight_;  // per lattice node; 0 for empty cells
  kernels::SourceCloud cloud_;  // point masses q_v * cell volume
  double m3_ = 1.0;
  double sqrt_m3_ = 1.0;
  int near_ = 1;
};

}  // namespace eshelby
