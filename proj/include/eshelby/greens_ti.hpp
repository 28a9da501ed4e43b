#pragma once

#include "eshelby/common.hpp"
#include "eshelby/materials.hpp"
#include "eshelby/region.hpp"

#include <array>
#include <vector>

namespace eshelby {

// Constants of the closed-form transversely isotropic Green function
// (x3 = symmetry axis). Non-degenerate branch: sqrt(C11 C33) - C13 - 2 C44 > 0;
// degenerate branch: the same quantity is zero (within kConstraintTol).
struct TIGreenConstants {
  bool degenerate = false;
  double C11 = 0, C12 = 0, C13 = 0, C33 = 0, C44 = 0;
  double v1 = 0, v2 = 0, v3 = 0;          // v1 >= v2 > 0 (non-degenerate)
  std::array<double, 2> A{}, H{}, k{};    // non-degenerate only
  double v = 0;                           // degenerate: (C11/C33)^(1/4)
};

// Throws DomainError for a non-TI tensor, C13 + C44 = 0, or the complex-root
// regime sqrt(C11 C33) - C13 - 2 C44 < 0.
TIGreenConstants ti_constants(const ElasticTensor& C);

// Green function G(x) (unit point force, C_ijkl G_km,jl + delta_im delta(x) = 0).
// Throws SingularityError at x = 0. On the symmetry axis the non-degenerate
// closed form is 0/0; there the value is the mean over four points offset by
// 1e-3 |x| perpendicular to the axis.
Mat3 green_ti(const TIGreenConstants& k, const Vec3& x);
Mat3 green_ti(const ElasticTensor& C, const Vec3& x);

// Eigenstress of the supported axisymmetric form diag(s11, s11, s33).
struct AxisymmetricEigenstress {
  double s11 = 0.0;
  double s33 = 0.0;
};

// Throws InputError unless sigma is diagonal with sigma11 == sigma22
// (relative 1e-12).
AxisymmetricEigenstress axisymmetric_eigenstress(const Mat3& sigma);

// One potential term of the displacement representation
//   u(x) = sum_t diag(K_t) grad_x W_t(x),
//   W_t(x) = int_Omega kernel_t(x - y) dy,
// kernel 0: 1/R_m(d); kernel 1: d3^2 / R_m(d)^3, with R_m(d) = sqrt(d1^2 + d2^2 + m d3^2).
struct TIPotentialTerm {
  Vec3 K = Vec3::Zero();
  double m3 = 1.0;
  int kernel = 0;
};

// Non-degenerate: terms -K^i with m = v_i^2 (two 1/R_i potentials).
// Degenerate: K^1 on 1/R_0 and K^2 on d3^2/R_0^3 with m = v^2.
std::vector<TIPotentialTerm> ti_displacement_terms(const TIGreenConstants& k, const AxisymmetricEigenstress& s);

// Diagonals of the tensors K^1, K^2 (signs as in u = -sum K^i grad W_i for
// the non-degenerate branch, u = K^1 grad W_0 + K^2 grad W_2 for the
// degenerate branch).
std::array<Vec3, 2> ti_k_tensors(const TIGreenConstants& k, const AxisymmetricEigenstress& s);

// Pointwise integrand: sum_t K_t * grad_d kernel_t(d) for a source at offset
// d = x - y. Its integral over Omega is the displacement.
Vec3 ti_displacement_integrand(const std::vector<TIPotentialTerm>& terms, const Vec3& d);

// Displacement of a uniform axisymmetric eigenstress on a voxel region at the
// query points (exact near-field cells, SIMD far field). Throws InputError for
// an unsupported eigenstress form.
std::vector<Vec3> displacement_uniform_eigenstrain(const VoxelRegion& region, const ElasticTensor& C,
                                                   const Mat3& sigma_star, const std::vector<Vec3>& points);

// Single-potential form u = -K* grad int v/(4 pi R_v) dy with
// K*11 = K*22 = s11/C11, K*33 = (C11 - C44 v^2) s11 / (v^2 (C13 + C44) C11),
// valid when s33/s11 equals the ratio gamma of scale_factors (v = v1).
std::vector<Vec3> displacement_single_potential(const VoxelRegion& region, const ElasticTensor& C, double s11,
                                                const std::vector<Vec3>& points);

}  // namespace eshelby
