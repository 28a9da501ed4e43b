#include "eshelby/elliptic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_rd.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace eshelby {

namespace {

bool repeated(double ai, double aj) {
  return std::abs(ai * ai - aj * aj) <= kRepeatedAxisTol * std::max(ai * ai, aj * aj);
}

}  // namespace

void IIntegralTable::set_Iijk(int i, int j, int k, double v) {
  const int p[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
  for (const auto& q : p) Iijk_data[9 * q[0] + 3 * q[1] + q[2]] = v;
}

void validate_axes(const EllipsoidAxes& axes) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(axes[i]) || axes[i] <= 0.0) {
      std::ostringstream os;
      os << "ellipsoid semi-axis a" << i + 1 << " must be positive and finite (got " << axes[i] << ")";
      throw DomainError(os.str());
    }
  }
}

double shape_integral_quadrature(const EllipsoidAxes& axes, std::initializer_list<int> indices, int s_power) {
  validate_axes(axes);
  const double a2[3] = {axes.a1 * axes.a1, axes.a2 * axes.a2, axes.a3 * axes.a3};
  const double m = std::min({a2[0], a2[1], a2[2]});
  const std::vector<int> idx(indices);
  auto integrand = [&](double theta) {
    const double tn = std::tan(theta);
    const double c = std::cos(theta);
    const double s = m * tn * tn;
    const double ds = 2.0 * m * tn / (c * c);
    double den = std::sqrt((a2[0] + s) * (a2[1] + s) * (a2[2] + s));
    for (int k : idx) den *= (a2[k] + s);
    return std::pow(s, s_power) * ds / den;
  };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, pi / 2.0, 20, 1e-15, &err);
  return 0.5 * axes.a1 * axes.a2 * axes.a3 * val;
}

IIntegralTable compute_i_integrals(const EllipsoidAxes& axes) {
  validate_axes(axes);
  IIntegralTable t;
  const double a[3] = {axes.a1, axes.a2, axes.a3};
  const double a2[3] = {a[0] * a[0], a[1] * a[1], a[2] * a[2]};
  const double V = a[0] * a[1] * a[2];

  t.I = V * boost::math::ellint_rf(a2[0], a2[1], a2[2]);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    t.Ii[i] = V / 3.0 * boost::math::ellint_rd(a2[j], a2[k], a2[i]);
  }

  // Off-diagonal I_ij.
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      double v;
      if (repeated(a[i], a[j])) {
        v = shape_integral_quadrature(axes, {i, j});
        ++t.quadrature_entries;
      } else {
        v = (t.Ii[j] - t.Ii[i]) / (a2[i] - a2[j]);
      }
      t.Iij(i, j) = t.Iij(j, i) = v;
    }
  }
  // Diagonal I_ii = (1/3)(1/a_i^2 - sum_{q != i} I_iq).
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int q = 0; q < 3; ++q)
      if (q != i) s += t.Iij(i, q);
    t.Iij(i, i) = (1.0 / a2[i] - s) / 3.0;
  }

  // I_123 and I_iij (i != j).
  {
    // I_ijk with all indices distinct: use any pair with distinct axes.
    double v = 0.0;
    bool done = false;
    const int pairs[3][3] = {{0, 1, 2}, {1, 2, 0}, {0, 2, 1}};
    for (const auto& p : pairs) {
      const int i = p[0], j = p[1], k = p[2];
      if (!repeated(a[i], a[j])) {
        v = (t.Iij(j, k) - t.Iij(i, k)) / (a2[i] - a2[j]);
        done = true;
        break;
      }
    }
    if (!done) {
      v = shape_integral_quadrature(axes, {0, 1, 2});
      ++t.quadrature_entries;
    }
    t.set_Iijk(0, 1, 2, v);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      double v;
      if (repeated(a[i], a[j])) {
        v = shape_integral_quadrature(axes, {i, i, j});
        ++t.quadrature_entries;
      } else {
        v = (t.Iij(i, j) - t.Iij(i, i)) / (a2[i] - a2[j]);
      }
      t.set_Iijk(i, i, j, v);
    }
  }
  // I_iii = (1/5)(1/a_i^4 - sum_{q != i} I_iiq).
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int q = 0; q < 3; ++q)
      if (q != i) s += t.Iijk(i, i, q);
    t.set_Iijk(i, i, i, (1.0 / (a2[i] * a2[i]) - s) / 5.0);
  }
  return t;
}

double RecurrenceResiduals::max() const {
  return std::max({sum_Ii, Iij_difference, Iii_relation, Iijk_difference, Iiii_relation});
}

RecurrenceResiduals recurrence_residuals(const EllipsoidAxes& axes, const IIntegralTable& t) {
  RecurrenceResiduals r;
  const double a2[3] = {axes.a1 * axes.a1, axes.a2 * axes.a2, axes.a3 * axes.a3};
  auto rel = [](double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
  };
  r.sum_Ii = std::abs(t.Ii.sum() - 1.0);
  for (int i = 0; i < 3; ++i) {
    double s2 = 0.0, s3 = 0.0;
    for (int q = 0; q < 3; ++q) {
      if (q == i) continue;
      s2 += t.Iij(i, q);
      s3 += t.Iijk(i, i, q);
    }
    r.Iii_relation = std::max(r.Iii_relation, rel(3.0 * t.Iij(i, i) + s2, 1.0 / a2[i]));
    r.Iiii_relation = std::max(r.Iiii_relation, rel(5.0 * t.Iijk(i, i, i) + s3, 1.0 / (a2[i] * a2[i])));
    for (int j = 0; j < 3; ++j) {
      if (i == j || repeated(std::sqrt(a2[i]), std::sqrt(a2[j]))) continue;
      r.Iij_difference =
          std::max(r.Iij_difference, rel(t.Iij(i, j) * (a2[i] - a2[j]), t.Ii[j] - t.Ii[i]));
      for (int k = 0; k < 3; ++k) {
        r.Iijk_difference = std::max(
            r.Iijk_difference, rel(t.Iijk(i, j, k) * (a2[i] - a2[j]), t.Iij(j, k) - t.Iij(i, k)));
      }
    }
  }
  return r;
}

}  // namespace eshelby
