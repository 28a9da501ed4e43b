#pragma once

#include "eshelby/common.hpp"
#include "eshelby/elliptic.hpp"

#include <array>

namespace eshelby {

// Ellipsoid E = {z : sum z_i^2/a_i^2 <= 1} placed in global coordinates by
// x = Q z + d.
struct EllipsoidPose {
  EllipsoidAxes axes;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 to_body(const Vec3& x) const { return rotation.transpose() * (x - translation); }
  Vec3 to_global(const Vec3& z) const { return rotation * z + translation; }
  bool contains(const Vec3& x) const;
};

// Throws DomainError for invalid axes or a rotation with |Q^T Q - I| > 1e-12.
void validate_pose(const EllipsoidPose& pose);

// Body-frame coefficients of the quartic interior potential
//   N(z) = C_E + A.z + sum B_i z_i^2 + H1 z1^3 + H2 z2^3 + H3 z3^3 + H4 z1 z2^2
//        + H5 z1 z3^2 + H6 z2 z1^2 + H7 z2 z3^2 + H8 z3 z1^2 + H9 z3 z2^2
//        + J1 z1^4 + J2 z2^4 + J3 z3^4 + J4 z1^2 z2^2 + J5 z2^2 z3^2 + J6 z3^2 z1^2
// of the density rho(x) = -|x|^2 with N = -int rho/(4 pi |x-y|).
struct NewtonianCoefficients {
  double C_E = 0.0;
  Vec3 A = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  std::array<double, 9> H{};
  std::array<double, 6> J{};
};

NewtonianCoefficients quadratic_density_coefficients(const EllipsoidPose& pose);

// Quartic coefficients J from the I_ijk form (valid for any axes).
std::array<double, 6> quartic_coeffs_from_table(const EllipsoidAxes& axes, const IIntegralTable& t);
// Quartic coefficients J from the form using I_i, I_ij and one extra integral
// per mixed term; safe for repeated axes. This is the primary path.
std::array<double, 6> quartic_coeffs_repeated_safe(const EllipsoidAxes& axes, const IIntegralTable& t);
// Quartic coefficients J using I_i only; requires pairwise distinct axes.
std::array<double, 6> quartic_coeffs_distinct(const EllipsoidAxes& axes, const IIntegralTable& t);

double eval_polynomial_potential(const NewtonianCoefficients& c, const Vec3& z);

// Potential at a global point inside the posed ellipsoid (quadratic density).
double quadratic_density_potential(const EllipsoidPose& pose, const NewtonianCoefficients& c, const Vec3& x);

// Interior potential of the constant density rho = c0: -(c0/2)(I - sum I_i z_i^2).
double constant_density_potential(const EllipsoidAxes& axes, double c0, const Vec3& z);

enum class SpheroidFamily { oblate, prolate };

// Closed-form J for a1 = a2 = a3/e (oblate e<1 with arccos, prolate e>1 with
// arccosh). Throws DomainError for e<=0, e==1 or an inconsistent family.
std::array<double, 6> spheroid_quartic_coeffs(double e, SpheroidFamily family);

}  // namespace eshelby
