// AVX2 kernels. This translation unit is the only one compiled with -mavx2;
// it is reached through the runtime dispatcher in kernels.cpp only when the
// CPU reports AVX2 support.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace eshelby::kernels::detail {

namespace {

// Gathers p[0], p[2], p[4], p[6] into one register.
inline __m256d load_evens(const double* p) {
  const __m256d lo = _mm256_loadu_pd(p);      // p0 p1 p2 p3
  const __m256d hi = _mm256_loadu_pd(p + 4);  // p4 p5 p6 p7
  const __m256d t = _mm256_unpacklo_pd(lo, hi);  // p0 p4 p2 p6
  return _mm256_permute4x64_pd(t, _MM_SHUFFLE(3, 1, 2, 0));
}

inline double hmax(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  double m = t[0];
  for (int i = 1; i < 4; ++i)
    if (t[i] > m) m = t[i];
  return m;
}

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

double sweep(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color, double omega) {
  const std::size_t sx = static_cast<std::size_t>(nx);
  const std::size_t sxy = sx * static_cast<std::size_t>(ny);
  const __m256d vomega = _mm256_set1_pd(omega);
  const __m256d sixth = _mm256_set1_pd(1.0 / 6.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vdelta = _mm256_setzero_pd();
  double delta = 0.0;
  for (int k = k_begin; k < k_end; ++k) {
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t row = sx * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
      int i = first_of_color(j, k, color);
      // Four same-colour nodes i, i+2, i+4, i+6 per step; touches V[i-1 .. i+7].
      for (; i + 6 <= nx - 2; i += 8) {
        double* c = V + row + i;
        const __m256d l = load_evens(c - 1);
        const __m256d r = load_evens(c + 1);
        const __m256d jm = load_evens(c - sx);
        const __m256d jp = load_evens(c + sx);
        const __m256d km = load_evens(c - sxy);
        const __m256d kp = load_evens(c + sxy);
        __m256d s = _mm256_add_pd(l, r);
        s = _mm256_add_pd(s, jm);
        s = _mm256_add_pd(s, jp);
        s = _mm256_add_pd(s, km);
        s = _mm256_add_pd(s, kp);
        const __m256d gs = _mm256_mul_pd(s, sixth);
        const __m256d clo = _mm256_loadu_pd(c);
        const __m256d chi = _mm256_loadu_pd(c + 4);
        const __m256d v = _mm256_permute4x64_pd(_mm256_unpacklo_pd(clo, chi), _MM_SHUFFLE(3, 1, 2, 0));
        const __m256d p = load_evens(phi + row + i);
        __m256d nv = _mm256_add_pd(v, _mm256_mul_pd(vomega, _mm256_sub_pd(gs, v)));
        nv = _mm256_max_pd(nv, p);
        vdelta = _mm256_max_pd(vdelta, _mm256_andnot_pd(sign, _mm256_sub_pd(nv, v)));
        // Scatter the four results back to the even slots, keeping the odd
        // (other colour) slots unchanged.
        const __m256d nlo = _mm256_permute4x64_pd(nv, _MM_SHUFFLE(1, 1, 0, 0));
        const __m256d nhi = _mm256_permute4x64_pd(nv, _MM_SHUFFLE(3, 3, 2, 2));
        _mm256_storeu_pd(c, _mm256_blend_pd(clo, nlo, 0x5));
        _mm256_storeu_pd(c + 4, _mm256_blend_pd(chi, nhi, 0x5));
      }
      for (; i <= nx - 2; i += 2) {
        const double d = relax_node(V, phi, row + i, sx, sxy, omega);
        if (d > delta) delta = d;
      }
    }
  }
  const double vd = hmax(vdelta);
  return vd > delta ? vd : delta;
}

double sum(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
           double py, double pz, double m3) {
  const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py), vpz = _mm256_set1_pd(pz);
  const __m256d vm3 = _mm256_set1_pd(m3);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(x + k));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(y + k));
    const __m256d dz = _mm256_sub_pd(vpz, _mm256_loadu_pd(z + k));
    __m256d r2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    r2 = _mm256_add_pd(r2, _mm256_mul_pd(vm3, _mm256_mul_pd(dz, dz)));
    const __m256d mask = _mm256_cmp_pd(r2, zero, _CMP_GT_OQ);
    const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), r2, mask);
    const __m256d t = _mm256_div_pd(_mm256_loadu_pd(q + k), _mm256_sqrt_pd(safe));
    acc = _mm256_add_pd(acc, _mm256_and_pd(t, mask));
  }
  double s = hsum(acc);
  for (; k < n; ++k) {
    const double dx = px - x[k], dy = py - y[k], dz = pz - z[k];
    const double r2 = dx * dx + dy * dy + m3 * (dz * dz);
    if (r2 > 0.0) s += q[k] / std::sqrt(r2);
  }
  return s;
}

void grad(const double* x, const double* y, const double* z, const double* q, std::size_t n, double px,
          double py, double pz, double m3, double* out) {
  const __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py), vpz = _mm256_set1_pd(pz);
  const __m256d vm3 = _mm256_set1_pd(m3);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d gx = zero, gy = zero, gz = zero;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(x + k));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(y + k));
    const __m256d dz = _mm256_sub_pd(vpz, _mm256_loadu_pd(z + k));
    __m256d r2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    r2 = _mm256_add_pd(r2, _mm256_mul_pd(vm3, _mm256_mul_pd(dz, dz)));
    const __m256d mask = _mm256_cmp_pd(r2, zero, _CMP_GT_OQ);
    const __m256d safe = _mm256_blendv_pd(one, r2, mask);
    const __m256d r = _mm256_sqrt_pd(safe);
    __m256d w = _mm256_div_pd(_mm256_loadu_pd(q + k), _mm256_mul_pd(safe, r));
    w = _mm256_and_pd(w, mask);
    gx = _mm256_sub_pd(gx, _mm256_mul_pd(w, dx));
    gy = _mm256_sub_pd(gy, _mm256_mul_pd(w, dy));
    gz = _mm256_sub_pd(gz, _mm256_mul_pd(w, _mm256_mul_pd(vm3, dz)));
  }
  double sx = hsum(gx), sy = hsum(gy), sz = hsum(gz);
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

KernelTable avx2_table() { return KernelTable{&sweep, &sum, &grad}; }

}  // namespace eshelby::kernels::detail
