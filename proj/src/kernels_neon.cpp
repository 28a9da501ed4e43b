// NEON (AArch64 Advanced SIMD) kernels, two doubles per register. NEON is
// mandatory on AArch64, so the dispatcher selects this variant whenever it
// is compiled in.

#include "kernels_impl.hpp"

#include <arm_neon.h>

#include <cmath>

namespace eshelby::kernels::detail {

namespace {

// Gathers p[0], p[2] into one register.
inline float64x2_t load_evens(const double* p) { return vld2q_f64(p).val[0]; }

double sweep(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color, double omega) {
  const std::size_t sx = static_cast<std::size_t>(nx);
  const std::size_t sxy = sx * static_cast<std::size_t>(ny);
  const float64x2_t vomega = vdupq_n_f64(omega);
  const float64x2_t sixth = vdupq_n_f64(1.0 / 6.0);
  float64x2_t vdelta = vdupq_n_f64(0.0);
  double delta = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = sx * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
      int i = first_of_color(j, k, color);
      // Two same-colour nodes i, i+2 per step; touches V[i-1 .. i+3].
      for (; i + 2 <= nx - 2; i += 4) {
        double* c = V + row + i;
        float64x2_t s = vaddq_f64(load_evens(c - 1), load_evens(c + 1));
        s = vaddq_f64(s, load_evens(c - sx));
        s = vaddq_f64(s, load_evens(c + sx));
        s = vaddq_f64(s, load_evens(c - sxy));
        s = vaddq_f64(s, load_evens(c + sxy));
        const float64x2_t gs = vmulq_f64(s, sixth);
        float64x2x2_t cur = vld2q_f64(c);
        const float64x2_t v = cur.val[0];
        // Separate multiply and add (no fused multiply-add) to match the
        // scalar rounding.
        float64x2_t nv = vaddq_f64(v, vmulq_f64(vomega, vsubq_f64(gs, v)));
        nv = vmaxq_f64(nv, load_evens(phi + row + i));
        vdelta = vmaxq_f64(vdelta, vabsq_f64(vsubq_f64(nv, v)));
        cur.val[0] = nv;
        vst2q_f64(c, cur);
      }
      for (; i <= nx - 2; i += 2) {
        const double d = relax_node(V, phi, row + i, sx, sxy, omega);
        if (d > delta) delta = d;
      }
    }
  }
  const double vd = vmaxvq_f64(vdelta);
  return vd > delta ? vd : delta;
}

double sum(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
           double py, double pz, double m3) {
  const float64x2_t vpx = vdupq_n_f64(px), vpy = vdupq_n_f64(py), vpz = vdupq_n_f64(pz);
  const float64x2_t vm3 = vdupq_n_f64(m3);
  const float64x2_t zero = vdupq_n_f64(0.0), one = vdupq_n_f64(1.0);
  float64x2_t acc = zero;
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t dx = vsubq_f64(vpx, vld1q_f64(x + k));
    const float64x2_t dy = vsubq_f64(vpy, vld1q_f64(y + k));
    const float64x2_t dz = vsubq_f64(vpz, vld1q_f64(z + k));
    float64x2_t r2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    r2 = vaddq_f64(r2, vmulq_f64(vm3, vmulq_f64(dz, dz)));
    const uint64x2_t mask = vcgtq_f64(r2, zero);
    const float64x2_t safe = vbslq_f64(mask, r2, one);
    const float64x2_t t = vdivq_f64(vld1q_f64(q + k), vsqrtq_f64(safe));
    acc = vaddq_f64(acc, vbslq_f64(mask, t, zero));
  }
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; k < n; ++k) {
    const double dx = px - x[k], dy = py - y[k], dz = pz - z[k];
    const double r2 = dx * dx + dy * dy + m3 * (dz * dz);
    if (r2 > 0.0) s += q[k] / std::sqrt(r2);
  }
  return s;
}

void grad(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
          double py, double pz, double m3, double* out) {
  const float64x2_t vpx = vdupq_n_f64(px), vpy = vdupq_n_f64(py), vpz = vdupq_n_f64(pz);
  const float64x2_t vm3 = vdupq_n_f64(m3);
  const float64x2_t zero = vdupq_n_f64(0.0), one = vdupq_n_f64(1.0);
  float64x2_t gx = zero, gy = zero, gz = zero;
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t dx = vsubq_f64(vpx, vld1q_f64(x + k));
    const float64x2_t dy = vsubq_f64(vpy, vld1q_f64(y + k));
    const float64x2_t dz = vsubq_f64(vpz, vld1q_f64(z + k));
    float64x2_t r2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    r2 = vaddq_f64(r2, vmulq_f64(vm3, vmulq_f64(dz, dz)));
    const uint64x2_t mask = vcgtq_f64(r2, zero);
    const float64x2_t safe = vbslq_f64(mask, r2, one);
    float64x2_t w = vdivq_f64(vld1q_f64(q + k), vmulq_f64(safe, vsqrtq_f64(safe)));
    w = vbslq_f64(mask, w, zero);
    gx = vsubq_f64(gx, vmulq_f64(w, dx));
    gy = vsubq_f64(gy, vmulq_f64(w, dy));
    gz = vsubq_f64(gz, vmulq_f64(w, vmulq_f64(vm3, dz)));
  }
  double sx = vgetq_lane_f64(gx, 0) + vgetq_lane_f64(gx, 1);
  double sy = vgetq_lane_f64(gy, 0) + vgetq_lane_f64(gy, 1);
  double sz = vgetq_lane_f64(gz, 0) + vgetq_lane_f64(gz, 1);
  for (; k < n; ++k) {
    const double dx = px - x[k], dy = py - y[k], dz = pz - z[k];
    const double r2 = dx * dx + dy * dy + m3 * (dz * dz);
    if (!(r2 > 0.0)) continue;
    const double r = std::sqrt(r2);
    const double w = q[k] / (r2 * r);
    sx -= w * dx;
    sy -= w * dy;
    sz -= w * (m3 * dz);
  }
  out[0] = sx;
  out[1] = sy;
  out[2] = sz;
}

}  // namespace

KernelTable neon_table() { return KernelTable{&sweep, &sum, &grad}; }

}  // namespace eshelby::kernels::detail
