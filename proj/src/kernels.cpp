#include "eshelby/kernels.hpp"

#include "kernels_impl.hpp"

#include <atomic>

namespace eshelby::kernels {

namespace {

detail::KernelTable table_for(Isa isa) {
  switch (isa) {
#if defined(ESHELBY_HAVE_AVX2_TU)
    case Isa::avx2:
      return detail::avx2_table();
#endif
#if defined(ESHELBY_HAVE_NEON_TU)
    case Isa::neon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detected_isa()};
  return slot;
}

void require_available(Isa isa) {
  if (!isa_available(isa)) throw InputError("instruction set variant not available: " + isa_name(isa));
}

}  // namespace

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(ESHELBY_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(ESHELBY_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return active_slot().load(); }

void set_active_isa(Isa isa) {
  require_available(isa);
  active_slot().store(isa);
}

double psor_color_sweep(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color,
                        double omega) {
  return table_for(active_isa()).sweep(V, phi, nx, ny, k_begin, k_end, color, omega);
}

double psor_color_sweep(Isa isa, double* V, const double* phi, int nx, int ny, int k_begin, int k_end,
                        int color, double omega) {
  require_available(isa);
  return table_for(isa).sweep(V, phi, nx, ny, k_begin, k_end, color, omega);
}

void SourceCloud::reserve(std::size_t n) {
  x.reserve(n);
  y.reserve(n);
  z.reserve(n);
  q.reserve(n);
}

void SourceCloud::push(double px, double py, double pz, double pq) {
  x.push_back(px);
  y.push_back(py);
  z.push_back(pz);
  q.push_back(pq);
}

double inverse_distance_sum(const SourceCloud& src, const Vec3& p, double m3) {
  return table_for(active_isa()).sum(src.x.data(), src.y.data(), src.z.data(), src.q.data(), src.size(), p[0],
                                     p[1], p[2], m3);
}

double inverse_distance_sum(Isa isa, const SourceCloud& src, const Vec3& p, double m3) {
  require_available(isa);
  return table_for(isa).sum(src.x.data(), src.y.data(), src.z.data(), src.q.data(), src.size(), p[0], p[1], p[2],
                            m3);
}

Vec3 inverse_distance_gradient(const SourceCloud& src, const Vec3& p, double m3) {
  return inverse_distance_gradient(active_isa(), src, p, m3);
}

Vec3 inverse_distance_gradient(Isa isa, const SourceCloud& src, const Vec3& p, double m3) {
  require_available(isa);
  double out[3];
  table_for(isa).grad(src.x.data(), src.y.data(), src.z.data(), src.q.data(), src.size(), p[0], p[1], p[2], m3,
                      out);
  return Vec3(out[0], out[1], out[2]);
}

}  // namespace eshelby::kernels
