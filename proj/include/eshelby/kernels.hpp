#pragma once

#include "eshelby/common.hpp"

#include <cstddef>
#include <string>
#include <vector>

// Hot loops with a scalar reference implementation and SIMD variants
// (AVX2 on x86-64, NEON on AArch64) selected at runtime.
namespace eshelby::kernels {

enum class Isa { scalar, avx2, neon };

std::string isa_name(Isa isa);
// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);
// Best available variant on this machine.
Isa detected_isa();
// Variant currently used by the dispatching entry points.
Isa active_isa();
// Select a variant explicitly (tests use this to compare variants). Throws
// InputError when the variant is not available.
void set_active_isa(Isa isa);

// Projected over-relaxation of one colour class of a red-black ordered 3D
// grid stored as V[i + nx*(j + ny*k)]. Updates interior nodes with
// (i+j+k) % 2 == color in planes k in [k_begin, k_end), k_begin >= 1,
// k_end <= nz-1:
//   V <- max(phi, V + omega * (mean of 6 neighbours - V)).
// Returns the largest absolute nodal update.
double psor_color_sweep(double* V, const double* phi, int nx, int ny, int k_begin, int k_end, int color,
                        double omega);
double psor_color_sweep(Isa isa, double* V, const double* phi, int nx, int ny, int k_begin, int k_end,
                        int color, double omega);

// Structure-of-arrays point sources.
struct SourceCloud {
  std::vector<double> x, y, z, q;
  void reserve(std::size_t n);
  void push(double px, double py, double pz, double pq);
  std::size_t size() const { return x.size(); }
};

// sum_k q_k / R_k with R_k = sqrt(dx^2 + dy^2 + m3 dz^2), d = p - source.
// Sources at zero distance are skipped.
double inverse_distance_sum(const SourceCloud& src, const Vec3& p, double m3 = 1.0);
double inverse_distance_sum(Isa isa, const SourceCloud& src, const Vec3& p, double m3 = 1.0);

// Gradient with respect to p of inverse_distance_sum:
//   sum_k -q_k (dx, dy, m3 dz) / R_k^3.
Vec3 inverse_distance_gradient(const SourceCloud& src, const Vec3& p, double m3 = 1.0);
Vec3 inverse_distance_gradient(Isa isa, const SourceCloud& src, const Vec3& p, double m3 = 1.0);

}  // namespace eshelby::kernels
