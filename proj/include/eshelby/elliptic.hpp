#pragma once

#include "eshelby/common.hpp"

#include <array>
#include <initializer_list>

namespace eshelby {

struct EllipsoidAxes {
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;

  double operator[](int i) const { return i == 0 ? a1 : (i == 1 ? a2 : a3); }
  Vec3 vec() const { return Vec3(a1, a2, a3); }
};

// Shape integrals of an ellipsoid (interior forms), normalised with the
// prefactor a1 a2 a3 / 2:
//   I      = (a1a2a3/2) int_0^inf ds / D(s)
//   I_i    = (a1a2a3/2) int_0^inf ds / ((a_i^2+s) D(s))
//   I_ij   = ... / ((a_i^2+s)(a_j^2+s) D(s))
//   I_ijk  = ... / ((a_i^2+s)(a_j^2+s)(a_k^2+s) D(s))
// with D(s) = sqrt((a1^2+s)(a2^2+s)(a3^2+s)). Indices are 0-based.
struct IIntegralTable {
  double I = 0.0;
  Vec3 Ii = Vec3::Zero();
  Mat3 Iij = Mat3::Zero();
  std::array<double, 27> Iijk_data{};
  // Number of entries that were obtained by direct quadrature because the
  // difference recurrences would divide by a (near-)zero axis difference.
  int quadrature_entries = 0;

  double Iijk(int i, int j, int k) const { return Iijk_data[9 * i + 3 * j + k]; }
  void set_Iijk(int i, int j, int k, double v);  // sets all permutations
};

// Relative axis-difference below which two axes are treated as repeated.
inline constexpr double kRepeatedAxisTol = 1e-9;

// I and I_i by Carlson symmetric forms, I_ij and I_ijk by the difference
// recurrences (quadrature for repeated-axis entries). Throws DomainError for
// non-positive or non-finite axes.
IIntegralTable compute_i_integrals(const EllipsoidAxes& axes);

// Direct adaptive Gauss-Kronrod evaluation of
//   (a1a2a3/2) int_0^inf s^s_power / prod_{idx}(a_idx^2+s) / D(s) ds
// after the substitution s = m tan^2(theta), m = min a_i^2.
double shape_integral_quadrature(const EllipsoidAxes& axes, std::initializer_list<int> indices,
                                 int s_power = 0);

// Largest deviations from the classical identities among I-integrals:
// sum I_i = 1, I_ij difference relation, I_ii relation, I_ijk relations and
// I_iii relation (all relative to the magnitude of the terms involved).
struct RecurrenceResiduals {
  double sum_Ii = 0.0;
  double Iij_difference = 0.0;
  double Iii_relation = 0.0;
  double Iijk_difference = 0.0;
  double Iiii_relation = 0.0;
  double max() const;
};
RecurrenceResiduals recurrence_residuals(const EllipsoidAxes& axes, const IIntegralTable& t);

void validate_axes(const EllipsoidAxes& axes);

}  // namespace eshelby
