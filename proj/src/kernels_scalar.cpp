// Scalar reference kernels. Every SIMD variant is tested for equivalence
// against these.

#include "kernels_impl.hpp"

#include <cmath>

namespace eshelby::kernels::detail {

namespace {

double sweep(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color, double omega) {
  const std::size_t sx = static_cast<std::size_t>(nx);
  const std::size_t sxy = sx * static_cast<std::size_t>(ny);
  double delta = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = sx * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
      for (int i = first_of_color(j, k, color); i <= nx - 2; i += 2) {
        const double d = relax_node(V, phi, row + i, sx, sxy, omega);
        if (d > delta) delta = d;
      }
    }
  }
  return delta;
}

double sum(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
           double py, double pz, double m3) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = px - x[k], dy = py - y[k], dz = pz - z[k];
    const double r2 = dx * dx + dy * dy + m3 * (dz * dz);
    if (r2 > 0.0) acc += q[k] / std::sqrt(r2);
  }
  return acc;
}

void grad(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
          double py, double pz, double m3, double* out) {
  double gx = 0.0, gy = 0.0, gz = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = px - x[k], dy = py - y[k], dz = pz - z[k];
    const double r2 = dx * dx + dy * dy + m3 * (dz * dz);
    if (!(r2 > 0.0)) continue;
    const double r = std::sqrt(r2);
    const double w = q[k] / (r2 * r);
    gx -= w * dx;
    gy -= w * dy;
    gz -= w * (m3 * dz);
  }
  out[0] = gx;
  out[1] = gy;
  out[2] = gz;
}

}  // namespace

KernelTable scalar_table() { return KernelTable{&sweep, &sum, &grad}; }

}  // namespace eshelby::kernels::detail
