#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eshelby/elliptic.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

using namespace eshelby;

namespace {

// Independent oracle: GSL adaptive quadrature on [0, inf) of
//   (a1 a2 a3 / 2) / (prod_{idx}(a_idx^2 + s) D(s)).
struct OracleParams {
  Vec3 a;
  std::vector<int> idx;
};

double oracle_integrand(double s, void* p) {
  const auto* op = static_cast<const OracleParams*>(p);
  const Vec3& a = op->a;
  double d = std::sqrt((a[0] * a[0] + s) * (a[1] * a[1] + s) * (a[2] * a[2] + s));
  double v = 1.0 / d;
  for (int i : op->idx) v /= a[i] * a[i] + s;
  return 0.5 * a[0] * a[1] * a[2] * v;
}

double gsl_shape_integral(const Vec3& a, std::vector<int> idx) {
  gsl_set_error_handler_off();
  OracleParams p{a, std::move(idx)};
  gsl_function f{&oracle_integrand, &p};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  double result = 0.0, err = 0.0;
  gsl_integration_qagiu(&f, 0.0, 0.0, 1e-12, 2000, w, &result, &err);
  gsl_integration_workspace_free(w);
  return result;
}

EllipsoidAxes axes_of(const Vec3& a) { return EllipsoidAxes{a[0], a[1], a[2]}; }

}  // namespace

TEST_CASE("sphere values") {
  const IIntegralTable t = compute_i_integrals({1, 1, 1});
  // For the unit sphere: I = 1, I_i = 1/3, I_ij = 1/5, I_ijk = 1/7.
  CHECK(t.I == doctest::Approx(1.0).epsilon(1e-13));
  for (int i = 0; i < 3; ++i) {
    CHECK(t.Ii[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    for (int j = 0; j < 3; ++j) {
      CHECK(t.Iij(i, j) == doctest::Approx(1.0 / 5.0).epsilon(1e-10));
      for (int k = 0; k < 3; ++k) CHECK(t.Iijk(i, j, k) == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("random ellipsoids match the GSL quadrature oracle") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 12; ++trial) {
    const Vec3 a(u(rng), u(rng), u(rng));
    const IIntegralTable t = compute_i_integrals(axes_of(a));
    CHECK(t.I == doctest::Approx(gsl_shape_integral(a, {})).epsilon(1e-10));
    for (int i = 0; i < 3; ++i) {
      CHECK(t.Ii[i] == doctest::Approx(gsl_shape_integral(a, {i})).epsilon(1e-10));
      for (int j = i; j < 3; ++j) {
        CHECK(t.Iij(i, j) == doctest::Approx(gsl_shape_integral(a, {i, j})).epsilon(1e-8));
        for (int k = j; k < 3; ++k)
          CHECK(t.Iijk(i, j, k) == doctest::Approx(gsl_shape_integral(a, {i, j, k})).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("repeated axes fall back to quadrature and stay accurate") {
  const Vec3 a(1.3, 1.3, 0.7);
  const IIntegralTable t = compute_i_integrals(axes_of(a));
  CHECK(t.quadrature_entries > 0);
  CHECK(t.Iij(0, 1) == doctest::Approx(gsl_shape_integral(a, {0, 1})).epsilon(1e-9));
  CHECK(t.Iijk(0, 0, 1) == doctest::Approx(gsl_shape_integral(a, {0, 0, 1})).epsilon(1e-9));
  CHECK(t.Iijk(0, 1, 2) == doctest::Approx(gsl_shape_integral(a, {0, 1, 2})).epsilon(1e-9));
  CHECK(recurrence_residuals(axes_of(a), t).max() <= 1e-8);
}

TEST_CASE("direct quadrature matches the GSL oracle") {
  const Vec3 a(0.6, 1.1, 1.9);
  CHECK(shape_integral_quadrature(axes_of(a), {0, 2}) == doctest::Approx(gsl_shape_integral(a, {0, 2})).epsilon(1e-10));
  CHECK(shape_integral_quadrature(axes_of(a), {}) == doctest::Approx(gsl_shape_integral(a, {})).epsilon(1e-10));
}

TEST_CASE("identities over 100 random axis triples") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_sum = 0.0, worst_rec = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const EllipsoidAxes a{u(rng), u(rng), u(rng)};
    const IIntegralTable t = compute_i_integrals(a);
    worst_sum = std::max(worst_sum, std::abs(t.Ii.sum() - 1.0));
    worst_rec = std::max(worst_rec, recurrence_residuals(a, t).max());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(worst_sum <= 1e-10);
  CHECK(worst_rec <= 1e-8);
  CHECK(seconds < 5.0);
}

TEST_CASE("invalid axes") {
  CHECK_THROWS_AS(compute_i_integrals({1, -1, 1}), DomainError);
  CHECK_THROWS_AS(compute_i_integrals({1, 0, 1}), DomainError);
  CHECK_THROWS_AS(compute_i_integrals({1, std::nan(""), 1}), DomainError);
}
