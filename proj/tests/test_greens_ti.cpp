#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eshelby/greens_ti.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <random>
#include <vector>

using namespace eshelby;

namespace {

const ElasticTensor& nondegenerate() {
  static const ElasticTensor C = make_transversely_isotropic(10, 3, 2, 8, 2.5);
  return C;
}
const ElasticTensor& degenerate() {
  static const ElasticTensor C = make_transversely_isotropic(16, 6, 2, 1, 1);
  return C;
}

// Synge's line-integral representation, valid for any anisotropy:
//   G(x) = 1/(8 pi^2 |x|) oint_{|xi| = 1, xi . x = 0} (xi C xi)^-1 ds.
// The integrand is smooth and periodic, so the midpoint rule converges
// spectrally.
Mat3 synge_oracle(const ElasticTensor& C, const Vec3& x, int N = 2048) {
  const Vec3 n = x.normalized();
  const Vec3 a = std::abs(n[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  const Vec3 e1 = (a - a.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  Mat3 S = Mat3::Zero();
  for (int m = 0; m < N; ++m) {
    const double t = 2.0 * pi * (m + 0.5) / N;
    const Vec3 xi = std::cos(t) * e1 + std::sin(t) * e2;
    Mat3 K = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          for (int l = 0; l < 3; ++l) K(i, k) += C.cijkl(i, j, k, l) * xi[j] * xi[l];
    S += K.inverse();
  }
  S *= 2.0 * pi / N;
  return S / (8.0 * pi * pi * x.norm());
}

// Kelvin solution for an isotropic medium.
Mat3 kelvin(double lambda, double mu, const Vec3& x) {
  const double nu = lambda / (2.0 * (lambda + mu));
  const double r = x.norm();
  return ((3.0 - 4.0 * nu) * Mat3::Identity() + x * x.transpose() / (r * r)) / (16.0 * pi * mu * (1.0 - nu) * r);
}

// dG_km / dx_l by central differences.
std::array<Mat3, 3> green_gradient(const TIGreenConstants& k, const Vec3& x, double h) {
  std::array<Mat3, 3> d;
  for (int l = 0; l < 3; ++l) {
    const Vec3 e = Vec3::Unit(l) * h;
    d[static_cast<std::size_t>(l)] = (green_ti(k, x + e) - green_ti(k, x - e)) / (2.0 * h);
  }
  return d;
}

}  // namespace

TEST_CASE("closed forms match the Synge line integral") {
  const Vec3 pts[] = {{0.3, -0.5, 0.7}, {1, 0, 0.5}, {1, 1, 0.5}, {1, 0, 0}, {0.2, 0.9, -1.3}, {-0.4, 0.1, 0.05}};
  for (const ElasticTensor* C : {&nondegenerate(), &degenerate()}) {
    for (const Vec3& x : pts) {
      CAPTURE(x.transpose());
      const Mat3 g = green_ti(*C, x);
      const Mat3 s = synge_oracle(*C, x);
      CHECK((g - s).cwiseAbs().maxCoeff() <= 1e-10 * s.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("isotropic constants reproduce the Kelvin solution") {
  const double lambda = 2.0, mu = 1.5;
  const ElasticTensor C = make_transversely_isotropic(lambda + 2 * mu, lambda, lambda, lambda + 2 * mu, mu);
  const TIGreenConstants k = ti_constants(C);
  CHECK(k.degenerate);
  CHECK(k.v == doctest::Approx(1.0));
  for (const Vec3& x : {Vec3(0.3, -0.5, 0.7), Vec3(1.0, 2.0, -0.5)}) {
    const Mat3 g = green_ti(k, x);
    const Mat3 ref = kelvin(lambda, mu, x);
    CHECK((g - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("symmetry, parity and homogeneity") {
  const TIGreenConstants k = ti_constants(nondegenerate());
  const Vec3 x(0.4, -0.3, 0.8);
  const Mat3 g = green_ti(k, x);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((green_ti(k, -x) - g).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((2.0 * green_ti(k, 2.0 * x) - g).cwiseAbs().maxCoeff() <= 1e-14);
  // Rotation about the symmetry axis.
  const double c = std::cos(0.9), s = std::sin(0.9);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  CHECK((green_ti(k, R * x) - R * g * R.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("equilibrium residual at |x| = 1") {
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  for (const ElasticTensor* C : {&nondegenerate(), &degenerate()}) {
    const TIGreenConstants k = ti_constants(*C);
    for (int t = 0; t < 6; ++t) {
      Vec3 x(nd(rng), nd(rng), nd(rng));
      x.normalize();
      const double h = 1e-3;
      // C_ijkl d^2 G_km / dx_j dx_l for every i, m.
      Mat3 residual = Mat3::Zero();
      double scale = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          const Vec3 ej = Vec3::Unit(j) * h, el = Vec3::Unit(l) * h;
          const Mat3 d2 = (green_ti(k, x + ej + el) - green_ti(k, x + ej - el) - green_ti(k, x - ej + el) +
                           green_ti(k, x - ej - el)) /
                          (4.0 * h * h);
          for (int i = 0; i < 3; ++i)
            for (int kk = 0; kk < 3; ++kk)
              for (int m = 0; m < 3; ++m) {
                const double term = C->cijkl(i, j, kk, l) * d2(kk, m);
                residual(i, m) += term;
                scale = std::max(scale, std::abs(term));
              }
        }
      CHECK(residual.cwiseAbs().maxCoeff() <= 1e-3 * scale);
    }
  }
}

TEST_CASE("tractions on a sphere balance the unit point force") {
  gsl_integration_glfixed_table* tt = gsl_integration_glfixed_table_alloc(48);
  gsl_integration_glfixed_table* tp = gsl_integration_glfixed_table_alloc(96);
  for (const ElasticTensor* C : {&nondegenerate(), &degenerate()}) {
    const TIGreenConstants k = ti_constants(*C);
    Mat3 force = Mat3::Zero();  // force(i, m) = oint sigma_ij^(m) n_j dS
    for (std::size_t it = 0; it < 48; ++it) {
      double ct, wt;
      gsl_integration_glfixed_point(-1.0, 1.0, it, &ct, &wt, tt);
      const double st = std::sqrt(1.0 - ct * ct);
      for (std::size_t ip = 0; ip < 96; ++ip) {
        double ph, wp;
        gsl_integration_glfixed_point(0.0, 2.0 * pi, ip, &ph, &wp, tp);
        const Vec3 n(st * std::cos(ph), st * std::sin(ph), ct);
        const auto dG = green_gradient(k, n, 1e-5);
        for (int i = 0; i < 3; ++i)
          for (int m = 0; m < 3; ++m) {
            double t = 0.0;
            for (int j = 0; j < 3; ++j)
              for (int kk = 0; kk < 3; ++kk)
                for (int l = 0; l < 3; ++l)
                  t += C->cijkl(i, j, kk, l) * dG[static_cast<std::size_t>(l)](kk, m) * n[j];
            force(i, m) += wt * wp * t;
          }
      }
    }
    CHECK((force + Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-6);
  }
  gsl_integration_glfixed_table_free(tt);
  gsl_integration_glfixed_table_free(tp);
}

TEST_CASE("root structure") {
  const TIGreenConstants d = ti_constants(degenerate());
  CHECK(d.degenerate);
  CHECK(std::abs(d.v - std::pow(16.0 / 1.0, 0.25)) <= 1e-12);
  const TIGreenConstants n = ti_constants(nondegenerate());
  CHECK_FALSE(n.degenerate);
  CHECK(n.v1 >= n.v2);
  CHECK(ti_quartic_residual(nondegenerate(), n.v1) <= 1e-10);
  CHECK(ti_quartic_residual(nondegenerate(), n.v2) <= 1e-10);
  CHECK(n.v3 == doctest::Approx(std::sqrt((10.0 - 3.0) / (2.0 * 2.5))));  // sqrt(C66 / C44)
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(green_ti(nondegenerate(), Vec3::Zero()), SingularityError);
  CHECK_THROWS_AS(ti_constants(make_cubic(4, -1, 1)), DomainError);
  CHECK_THROWS_AS(ti_constants(make_transversely_isotropic(10, 3, -2.5, 8, 2.5)), DomainError);  // C13 + C44 = 0
  CHECK_THROWS_AS(ti_constants(make_transversely_isotropic(4, 1, 3, 1, 1)), DomainError);        // complex roots
  CHECK_THROWS_AS(axisymmetric_eigenstress(Vec3(1, 2, 3).asDiagonal()), InputError);
}

TEST_CASE("uniform eigenstress in a sphere reproduces Eshelby's isotropic solution") {
  // Isotropic medium written in transversely isotropic form (degenerate branch).
  const double lambda = 1.0, mu = 1.0, nu = lambda / (2.0 * (lambda + mu));
  const ElasticTensor C = make_transversely_isotropic(lambda + 2 * mu, lambda, lambda, lambda + 2 * mu, mu);
  const double h = 1.0 / 24.0;
  const VoxelRegion ball = voxelize([](const Vec3& x) { return x.squaredNorm() <= 0.25; }, Vec3::Constant(-0.55),
                                    Vec3::Constant(0.55), Vec3::Constant(h));
  const Mat3 sigma = Vec3(1.0, 1.0, 0.4).asDiagonal();
  // Eigenstrain eps* = C^-1 sigma*; interior strain S : eps* with the sphere tensor.
  const double E = mu * (3 * lambda + 2 * mu) / (lambda + mu);
  Mat3 eps_star = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    eps_star(i, i) = (sigma(i, i) - nu * (sigma.trace() - sigma(i, i))) / E;
  const double s1111 = (7.0 - 5.0 * nu) / (15.0 * (1.0 - nu));
  const double s1122 = (5.0 * nu - 1.0) / (15.0 * (1.0 - nu));
  Mat3 expected = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) expected(i, i) += (i == j ? s1111 : s1122) * eps_star(j, j);

  const Vec3 x0(0.05, -0.04, 0.03);
  const double s = 2.0 * h;
  std::vector<Vec3> q;
  for (int a = 0; a < 3; ++a) {
    q.push_back(x0 + s * Vec3::Unit(a));
    q.push_back(x0 - s * Vec3::Unit(a));
  }
  const auto u = displacement_uniform_eigenstrain(ball, C, sigma, q);
  Mat3 G;
  for (int a = 0; a < 3; ++a) G.col(a) = (u[static_cast<std::size_t>(2 * a)] - u[static_cast<std::size_t>(2 * a + 1)]) / (2 * s);
  const Mat3 strain = 0.5 * (G + G.transpose());
  CHECK((strain - expected).norm() <= 0.03 * expected.norm());
}

TEST_CASE("single-potential form agrees with the two-potential form at the matched ratio") {
  const ElasticTensor& C = nondegenerate();
  const ScaleFactors f = scale_factors(C);
  const VoxelRegion r = voxelize([](const Vec3& x) { return x.cwiseAbs().maxCoeff() <= 0.3; }, Vec3::Constant(-0.35),
                                 Vec3::Constant(0.35), Vec3::Constant(0.05));
  const std::vector<Vec3> pts{{0.1, 0.05, -0.1}, {0.5, 0.2, 0.3}, {0.0, 0.0, 0.6}};
  const auto a = displacement_uniform_eigenstrain(r, C, Vec3(1.0, 1.0, f.gamma).asDiagonal(), pts);
  const auto b = displacement_single_potential(r, C, 1.0, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((a[i] - b[i]).norm() <= 1e-8 * std::max(1e-12, a[i].norm()));
}

TEST_CASE("potential integrand equals the Green-function eigenstress integrand") {
  // u_i = -int G_ij,k(x - y) sigma*_jk dy, so pointwise the integrand is
  // -G_ij,k(d) sigma*_jk.
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  for (const ElasticTensor* C : {&nondegenerate(), &degenerate()}) {
    const TIGreenConstants k = ti_constants(*C);
    for (const Vec3& s : {Vec3(1, 1, 0), Vec3(0, 0, 1), Vec3(0.7, 0.7, -0.3)}) {
      const Mat3 sigma = s.asDiagonal();
      const auto terms = ti_displacement_terms(k, axisymmetric_eigenstress(sigma));
      for (int t = 0; t < 20; ++t) {
        const Vec3 d(nd(rng), nd(rng), nd(rng));
        const auto dG = green_gradient(k, d, 1e-5);
        Vec3 ref = Vec3::Zero();
        for (int kk = 0; kk < 3; ++kk) ref -= dG[static_cast<std::size_t>(kk)] * sigma.col(kk);
        CHECK((ti_displacement_integrand(terms, d) - ref).norm() <= 1e-8 * std::max(1.0, ref.norm()));
      }
    }
  }
}

TEST_CASE("strain inside a voxel spheroid is nearly uniform") {
  const double h = 1.0 / 24.0;
  const Vec3 a(0.5, 0.5, 0.35);
  const VoxelRegion r = voxelize([&](const Vec3& x) { return x.cwiseQuotient(a).squaredNorm() <= 1.0; }, -1.1 * a,
                                 1.1 * a, Vec3::Constant(h));
  const Vec3 centres[] = {{0, 0, 0}, {0.12, -0.08, 0.05}, {-0.1, 0.15, -0.07}};
  for (const ElasticTensor* C : {&nondegenerate(), &degenerate()}) {
    const Mat3 sigma = Vec3(1.0, 1.0, 0.5).asDiagonal();
    const double s = 2.0 * h;
    std::vector<Vec3> q;
    for (const Vec3& c : centres)
      for (int d = 0; d < 3; ++d) {
        q.push_back(c + s * Vec3::Unit(d));
        q.push_back(c - s * Vec3::Unit(d));
      }
    const auto u = displacement_uniform_eigenstrain(r, *C, sigma, q);
    std::vector<Mat3> eps;
    for (std::size_t c = 0; c < 3; ++c) {
      Mat3 G;
      for (int d = 0; d < 3; ++d)
        G.col(d) = (u[6 * c + 2 * static_cast<std::size_t>(d)] - u[6 * c + 2 * static_cast<std::size_t>(d) + 1]) / (2 * s);
      eps.push_back(0.5 * (G + G.transpose()));
    }
    for (std::size_t c = 1; c < 3; ++c) CHECK((eps[c] - eps[0]).norm() <= 0.02 * eps[0].norm());
  }
}
