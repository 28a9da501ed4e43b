#include "eshelby/ellipsoid_potential.hpp"

#include <cmath>
#include <sstream>

namespace eshelby {

bool EllipsoidPose::contains(const Vec3& x) const {
  const Vec3 z = to_body(x);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += z[i] * z[i] / (axes[i] * axes[i]);
  return s <= 1.0;
}

void validate_pose(const EllipsoidPose& pose) {
  validate_axes(pose.axes);
  const double dev = (pose.rotation.transpose() * pose.rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-12)) {
    std::ostringstream os;
    os << "ellipsoid rotation is not orthogonal (|Q^T Q - I| = " << dev << ")";
    throw DomainError(os.str());
  }
  if (!pose.translation.allFinite()) throw DomainError("ellipsoid translation is not finite");
}

std::array<double, 6> quartic_coeffs_from_table(const EllipsoidAxes& ax, const IIntegralTable& t) {
  const double a2[3] = {ax.a1 * ax.a1, ax.a2 * ax.a2, ax.a3 * ax.a3};
  const double a4[3] = {a2[0] * a2[0], a2[1] * a2[1], a2[2] * a2[2]};
  const double S = a2[0] + a2[1] + a2[2];
  std::array<double, 6> J{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    J[i] = t.Iij(i, i) * S / 8.0 - 5.0 / 8.0 * t.Iijk(i, i, i) * a4[i] - a4[j] * t.Iijk(i, i, j) / 8.0 -
           a4[k] * t.Iijk(i, i, k) / 8.0;
  }
  // Mixed terms J4 (z1 z2), J5 (z2 z3), J6 (z3 z1).
  const int pairs[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0], j = pairs[p][1], k = pairs[p][2];
    J[3 + p] = S * t.Iij(i, j) / 4.0 - 0.75 * (a4[i] * t.Iijk(j, i, i) + a4[j] * t.Iijk(i, j, j)) -
               a4[k] * t.Iijk(0, 1, 2) / 4.0;
  }
  return J;
}

std::array<double, 6> quartic_coeffs_repeated_safe(const EllipsoidAxes& ax, const IIntegralTable& t) {
  const double a2[3] = {ax.a1 * ax.a1, ax.a2 * ax.a2, ax.a3 * ax.a3};
  std::array<double, 6> J{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    J[i] = -1.0 / 6.0 + (4.0 * a2[i] + 3.0 * a2[j]) * t.Iij(i, j) / 24.0 +
           (4.0 * a2[i] + 3.0 * a2[k]) * t.Iij(i, k) / 24.0;
  }
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0], j = pairs[p][1];
    // (a1a2a3/8) int s ds/((a_i^2+s)(a_j^2+s)D) is one quarter of the
    // normalised shape integral with s_power = 1.
    const double extra = 0.25 * shape_integral_quadrature(ax, {i, j}, 1);
    J[3 + p] = 0.25 * (t.Ii[i] + t.Ii[j]) - 0.75 * (a2[i] + a2[j]) * t.Iij(i, j) + extra;
  }
  return J;
}

std::array<double, 6> quartic_coeffs_distinct(const EllipsoidAxes& ax, const IIntegralTable& t) {
  const double a2[3] = {ax.a1 * ax.a1, ax.a2 * ax.a2, ax.a3 * ax.a3};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(a2[i] - a2[j]) <= kRepeatedAxisTol * std::max(a2[i], a2[j])) {
        throw DomainError("quartic_coeffs_distinct requires pairwise distinct semi-axes");
      }
    }
  }
  const double I1 = t.Ii[0], I2 = t.Ii[1], I3 = t.Ii[2];
  const double x1 = a2[0], x2 = a2[1], x3 = a2[2];
  std::array<double, 6> J{};
  J[0] = -1.0 / 6.0 + (I2 - I1) * (4 * x1 + 3 * x2) / (24 * (x1 - x2)) +
         (I3 - I1) * (4 * x1 + 3 * x3) / (24 * (x1 - x3));
  J[1] = -1.0 / 6.0 + (I2 - I1) * (4 * x2 + 3 * x1) / (24 * (x1 - x2)) +
         (I3 - I2) * (4 * x2 + 3 * x3) / (24 * (x2 - x3));
  J[2] = -1.0 / 6.0 + (I3 - I1) * (4 * x3 + 3 * x1) / (24 * (x1 - x3)) +
         (I3 - I2) * (4 * x3 + 3 * x2) / (24 * (x2 - x3));
  J[3] = ((5 * x1 + 2 * x2) * I1 - (5 * x2 + 2 * x1) * I2) / (4 * (x1 - x2));
  J[4] = ((5 * x2 + 2 * x3) * I2 - (5 * x3 + 2 * x2) * I3) / (4 * (x2 - x3));
  J[5] = ((5 * x3 + 2 * x1) * I3 - (5 * x1 + 2 * x3) * I1) / (4 * (x3 - x1));
  return J;
}

NewtonianCoefficients quadratic_density_coefficients(const EllipsoidPose& pose) {
  validate_pose(pose);
  const EllipsoidAxes& ax = pose.axes;
  const IIntegralTable t = compute_i_integrals(ax);
  const double a2[3] = {ax.a1 * ax.a1, ax.a2 * ax.a2, ax.a3 * ax.a3};
  const double a4[3] = {a2[0] * a2[0], a2[1] * a2[1], a2[2] * a2[2]};
  const double S = a2[0] + a2[1] + a2[2];
  const double d2 = pose.translation.squaredNorm();
  // f = 2 (d . Q): linear density term in the body frame.
  const Vec3 f = 2.0 * pose.rotation.transpose() * pose.translation;

  NewtonianCoefficients c;
  c.C_E = (S * t.I - (a4[0] * t.Ii[0] + a4[1] * t.Ii[1] + a4[2] * t.Ii[2])) / 8.0 + 0.5 * d2 * t.I;
  for (int i = 0; i < 3; ++i) {
    c.A[i] = 0.5 * a2[i] * t.Ii[i] * f[i];
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    c.B[i] = 0.75 * t.Iij(i, i) * a4[i] + 0.25 * t.Iij(i, j) * a4[j] + 0.25 * t.Iij(i, k) * a4[k] -
             0.25 * S * t.Ii[i] - 0.5 * d2 * t.Ii[i];
  }
  c.H[0] = -0.5 * a2[0] * t.Iij(0, 0) * f[0];
  c.H[1] = -0.5 * a2[1] * t.Iij(1, 1) * f[1];
  c.H[2] = -0.5 * a2[2] * t.Iij(2, 2) * f[2];
  c.H[3] = -0.5 * a2[0] * t.Iij(1, 0) * f[0];
  c.H[4] = -0.5 * a2[0] * t.Iij(2, 0) * f[0];
  c.H[5] = -0.5 * a2[1] * t.Iij(1, 0) * f[1];
  c.H[6] = -0.5 * a2[1] * t.Iij(1, 2) * f[1];
  c.H[7] = -0.5 * a2[2] * t.Iij(0, 2) * f[2];
  c.H[8] = -0.5 * a2[2] * t.Iij(1, 2) * f[2];
  c.J = quartic_coeffs_repeated_safe(ax, t);
  return c;
}

double eval_polynomial_potential(const NewtonianCoefficients& c, const Vec3& z) {
  const double z1 = z[0], z2 = z[1], z3 = z[2];
  const double q1 = z1 * z1, q2 = z2 * z2, q3 = z3 * z3;
  double v = c.C_E + c.A.dot(z) + c.B[0] * q1 + c.B[1] * q2 + c.B[2] * q3;
  v += c.H[0] * q1 * z1 + c.H[1] * q2 * z2 + c.H[2] * q3 * z3;
  v += c.H[3] * z1 * q2 + c.H[4] * z1 * q3 + c.H[5] * z2 * q1 + c.H[6] * z2 * q3 + c.H[7] * z3 * q1 +
       c.H[8] * z3 * q2;
  v += c.J[0] * q1 * q1 + c.J[1] * q2 * q2 + c.J[2] * q3 * q3 + c.J[3] * q1 * q2 + c.J[4] * q2 * q3 +
       c.J[5] * q3 * q1;
  return v;
}

double quadratic_density_potential(const EllipsoidPose& pose, const NewtonianCoefficients& c, const Vec3& x) {
  return eval_polynomial_potential(c, pose.to_body(x));
}

double constant_density_potential(const EllipsoidAxes& axes, double c0, const Vec3& z) {
  const IIntegralTable t = compute_i_integrals(axes);
  double s = t.I;
  for (int i = 0; i < 3; ++i) s -= t.Ii[i] * z[i] * z[i];
  return -0.5 * c0 * s;
}

std::array<double, 6> spheroid_quartic_coeffs(double e, SpheroidFamily family) {
  if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("spheroid aspect ratio must be positive");
  if (e == 1.0) throw DomainError("aspect ratio e = 1 is a sphere; use the sphere path");
  if ((family == SpheroidFamily::oblate) != (e < 1.0)) {
    throw DomainError("spheroid family inconsistent with aspect ratio (oblate needs e<1, prolate e>1)");
  }
  const double e2 = e * e;
  double S, D, ang;
  if (family == SpheroidFamily::oblate) {
    S = std::sqrt(1.0 - e2);
    ang = std::acos(e);
  } else {
    S = std::sqrt(e2 - 1.0);
    ang = std::acosh(e);
  }
  D = S * S * S * S * S;
  const double g = 3.0 * e * (3.0 + 4.0 * e2) * ang;
  std::array<double, 6> J{};
  J[0] = J[1] = -((2 * e2 - 23) * e2 * S + g) / (64 * D);
  J[2] = -(-(2 + 19 * e2) * S + g) / (24 * D);
  J[3] = -((2 * e2 - 23) * e2 * S + g) / (32 * D);
  J[4] = J[5] = -((2 * e2 * e2 + 15 * e2 + 4) * S - g) / (8 * D);
  return J;
}

}  // namespace eshelby
