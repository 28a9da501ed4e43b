#pragma once

// Plain-pointer kernel signatures shared by the scalar and SIMD translation
// units. Kept free of Eigen so the SIMD units compile with minimal headers.

#include <cstddef>

namespace eshelby::kernels::detail {

using SweepFn = double (*)(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color,
                           double omega);
using SumFn = double (*)(const double* x, const double* y, const double* z, const double* q, std::size_t n,
                         double px, double py, double pz, double m3);
using GradFn = void (*)(const double* x, const double* y, const double* z, const double* q, std::size_t n,
                        double px, double py, double pz, double m3, double* out3);

struct KernelTable {
  SweepFn sweep = nullptr;
  SumFn sum = nullptr;
  GradFn grad = nullptr;
};

// First interior index i >= 1 of colour `color` in row (j, k).
inline int first_of_color(int j, int k, int color) { return 1 + ((1 + j + k + color) & 1); }

// Scalar update of one node; shared by all variants for loop tails so the
// arithmetic is identical to the vector lanes.
inline double relax_node(double* V, const double* phi, std::size_t idx, std::size_t nx, std::size_t nxy,
                         double omega) {
  const double* c = V + idx;
  double s = c[-1] + c[1];
  s += c[-static_cast<std::ptrdiff_t>(nx)];
  s += c[nx];
  s += c[-static_cast<std::ptrdiff_t>(nxy)];
  s += c[nxy];
  const double gs = s * (1.0 / 6.0);
  const double v = *c;
  double nv = v + omega * (gs - v);
  if (nv < phi[idx]) nv = phi[idx];
  V[idx] = nv;
  const double d = nv - v;
  return d < 0 ? -d : d;
}

KernelTable scalar_table();
#if defined(ESHELBY_HAVE_AVX2_TU)
KernelTable avx2_table();
#endif
#if defined(ESHELBY_HAVE_NEON_TU)
KernelTable neon_table();
#endif

}  // namespace eshelby::kernels::detail
