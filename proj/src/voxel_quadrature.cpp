#include "eshelby/voxel_quadrature.hpp"

#include <cmath>

namespace eshelby {

namespace {

// ln(c + r) with r = sqrt(s + c^2), evaluated without cancellation for c < 0.
// Only called when s > 0 or c >= 0.
double log_c_plus_r(double c, double r, double s) {
  if (c >= 0.0) return std::log(c + r);
  return std::log(s / (r - c));
}

// Antiderivative of 1/r over a box corner at relative position (x, y, z).
double prism_primitive(double x, double y, double z) {
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  const double r = std::sqrt(x2 + y2 + z2);
  if (r == 0.0) return 0.0;
  double f = 0.0;
  if (x != 0.0 && y != 0.0) f += x * y * log_c_plus_r(z, r, x2 + y2);
  if (y != 0.0 && z != 0.0) f += y * z * log_c_plus_r(x, r, y2 + z2);
  if (z != 0.0 && x != 0.0) f += z * x * log_c_plus_r(y, r, z2 + x2);
  if (x != 0.0) f -= 0.5 * x2 * std::atan(y * z / (x * r));
  if (y != 0.0) f -= 0.5 * y2 * std::atan(z * x / (y * r));
  if (z != 0.0) f -= 0.5 * z2 * std::atan(x * y / (z * r));
  return f;
}

// Antiderivative of 1/r over a rectangle corner (u, v) in a plane at signed
// distance w.
double face_primitive(double u, double v, double w) {
  const double u2 = u * u, v2 = v * v, w2 = w * w;
  const double r = std::sqrt(u2 + v2 + w2);
  if (r == 0.0) return 0.0;
  double f = 0.0;
  if (u != 0.0) f += u * log_c_plus_r(v, r, u2 + w2);
  if (v != 0.0) f += v * log_c_plus_r(u, r, v2 + w2);
  if (w != 0.0) f -= w * std::atan(u * v / (w * r));
  return f;
}

// Integral of 1/r over the rectangle [u0,u1]x[v0,v1] in the plane at distance w.
double face_integral(double u0, double u1, double v0, double v1, double w) {
  return face_primitive(u1, v1, w) - face_primitive(u0, v1, w) - face_primitive(u1, v0, w) +
         face_primitive(u0, v0, w);
}

}  // namespace

double box_inverse_distance(const Vec3& lo, const Vec3& hi, const Vec3& x) {
  const double a[2] = {lo[0] - x[0], hi[0] - x[0]};
  const double b[2] = {lo[1] - x[1], hi[1] - x[1]};
  const double c[2] = {lo[2] - x[2], hi[2] - x[2]};
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double sign = ((i + j + k) % 2 == 1) ? 1.0 : -1.0;
        s += sign * prism_primitive(a[i], b[j], c[k]);
      }
  return s;
}

Vec3 box_inverse_distance_gradient(const Vec3& lo, const Vec3& hi, const Vec3& x) {
  Vec3 g;
  for (int p = 0; p < 3; ++p) {
    const int q = (p + 1) % 3, t = (p + 2) % 3;
    const double u0 = lo[q] - x[q], u1 = hi[q] - x[q];
    const double v0 = lo[t] - x[t], v1 = hi[t] - x[t];
    g[p] = face_integral(u0, u1, v0, v1, lo[p] - x[p]) - face_integral(u0, u1, v0, v1, hi[p] - x[p]);
  }
  return g;
}

VoxelIntegrator::VoxelIntegrator(const VoxelRegion& region, const std::function<double(const Vec3&)>& density,
                                 double m3, int near)
    : region_(region), m3_(m3), sqrt_m3_(std::sqrt(m3)), near_(near) {
  if (!(m3 > 0.0) || !std::isfinite(m3)) throw DomainError("kernel metric must be positive");
  if (near < 0) throw InputError("near-field radius must be non-negative");
  weight_.assign(region_.size(), 0.0);
  const double vol = region_.voxel_volume();
  cloud_.reserve(region_.count());
  for (const auto& ijk : region_.occupied_indices()) {
    const Vec3 c = region_.center(ijk[0], ijk[1], ijk[2]);
    const double q = density(c);
    weight_[region_.index(ijk[0], ijk[1], ijk[2])] = q;
    if (q != 0.0) cloud_.push(c[0], c[1], c[2], q * vol);
  }
}

double VoxelIntegrator::cell_integral(const Vec3& c, const Vec3& x) const {
  const Vec3 half = 0.5 * region_.spacing;
  Vec3 lo = c - half, hi = c + half, xs = x;
  lo[2] *= sqrt_m3_;
  hi[2] *= sqrt_m3_;
  xs[2] *= sqrt_m3_;
  return box_inverse_distance(lo, hi, xs) / sqrt_m3_;
}

Vec3 VoxelIntegrator::cell_gradient(const Vec3& c, const Vec3& x) const {
  const Vec3 half = 0.5 * region_.spacing;
  Vec3 lo = c - half, hi = c + half, xs = x;
  lo[2] *= sqrt_m3_;
  hi[2] *= sqrt_m3_;
  xs[2] *= sqrt_m3_;
  Vec3 g = box_inverse_distance_gradient(lo, hi, xs);
  g[0] /= sqrt_m3_;
  g[1] /= sqrt_m3_;
  return g;
}

Vec3 VoxelIntegrator::snap(const Vec3& x) const {
  // A query within rounding distance of a source centre would make the far
  // sum add q/r for r ~ 1e-17 and the near-field correction subtract it again,
  // cancelling every other digit. Snapping onto the centre makes both skip it.
  const auto c0 = region_.nearest_index(x);
  const Vec3 c = region_.center(c0[0], c0[1], c0[2]);
  const Vec3 tol = 1e-7 * region_.spacing;
  for (int a = 0; a < 3; ++a)
    if (std::abs(x[a] - c[a]) > tol[a]) return x;
  return c;
}

double VoxelIntegrator::integral(const Vec3& xq) const {
  const Vec3 x = snap(xq);
  double s = kernels::inverse_distance_sum(cloud_, x, m3_);
  if (near_ == 0) return s;
  const double vol = region_.voxel_volume();
  const auto c0 = region_.nearest_index(x);
  for (int dk = -near_; dk <= near_; ++dk)
    for (int dj = -near_; dj <= near_; ++dj)
      for (int di = -near_; di <= near_; ++di) {
        const int i = c0[0] + di, j = c0[1] + dj, k = c0[2] + dk;
        if (!region_.occupied(i, j, k)) continue;
        const double q = weight_[region_.index(i, j, k)];
        if (q == 0.0) continue;
        const Vec3 c = region_.center(i, j, k);
        const Vec3 d = x - c;
        const double r2 = d[0] * d[0] + d[1] * d[1] + m3_ * (d[2] * d[2]);
        if (r2 > 0.0) s -= q * vol / std::sqrt(r2);
        s += q * cell_integral(c, x);
      }
  return s;
}

Vec3 VoxelIntegrator::integral_gradient(const Vec3& xq) const {
  const Vec3 x = snap(xq);
  Vec3 g = kernels::inverse_distance_gradient(cloud_, x, m3_);
  if (near_ == 0) return g;
  const double vol = region_.voxel_volume();
  const auto c0 = region_.nearest_index(x);
  for (int dk = -near_; dk <= near_; ++dk)
    for (int dj = -near_; dj <= near_; ++dj)
      for (int di = -near_; di <= near_; ++di) {
        const int i = c0[0] + di, j = c0[1] + dj, k = c0[2] + dk;
        if (!region_.occupied(i, j, k)) continue;
        const double q = weight_[region_.index(i, j, k)];
        if (q == 0.0) continue;
        const Vec3 c = region_.center(i, j, k);
        const Vec3 d = x - c;
        const double r2 = d[0] * d[0] + d[1] * d[1] + m3_ * (d[2] * d[2]);
        if (r2 > 0.0) {
          const double r = std::sqrt(r2);
          const double w = q * vol / (r2 * r);
          g += w * Vec3(d[0], d[1], m3_ * d[2]);
        }
        g += q * cell_gradient(c, x);
      }
  return g;
}

}  // namespace eshelby
