#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eshelby/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace eshelby;
using namespace eshelby::kernels;

namespace {

std::vector<Isa> available_simd() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

SourceCloud random_cloud(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SourceCloud c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.push(u(rng), u(rng), u(rng), u(rng));
  return c;
}

// Plain-loop oracle for the point-source sums.
double oracle_sum(const SourceCloud& s, const Vec3& p, double m3) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double dx = p[0] - s.x[k], dy = p[1] - s.y[k], dz = p[2] - s.z[k];
    const double r2 = dx * dx + dy * dy + m3 * dz * dz;
    if (r2 == 0.0) continue;
    acc += s.q[k] / std::sqrt(r2);
  }
  return static_cast<double>(acc);
}

Vec3 oracle_gradient(const SourceCloud& s, const Vec3& p, double m3) {
  Vec3 g = Vec3::Zero();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3 d(p[0] - s.x[k], p[1] - s.y[k], p[2] - s.z[k]);
    const double r2 = d[0] * d[0] + d[1] * d[1] + m3 * d[2] * d[2];
    if (r2 == 0.0) continue;
    const double r3 = r2 * std::sqrt(r2);
    g -= s.q[k] * Vec3(d[0], d[1], m3 * d[2]) / r3;
  }
  return g;
}

}  // namespace

TEST_CASE("dispatch reports a usable instruction set") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_available(detected_isa()));
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  set_active_isa(before);
  CHECK(isa_name(Isa::scalar) == "scalar");
}

TEST_CASE("scalar sums match the plain-loop oracle") {
  std::mt19937 rng(1);
  const SourceCloud c = random_cloud(1001, rng);
  for (double m3 : {1.0, 0.25, 4.0}) {
    const Vec3 p(0.31, -0.2, 1.7);
    CHECK(inverse_distance_sum(Isa::scalar, c, p, m3) == doctest::Approx(oracle_sum(c, p, m3)).epsilon(1e-12));
    const Vec3 g = inverse_distance_gradient(Isa::scalar, c, p, m3);
    const Vec3 go = oracle_gradient(c, p, m3);
    CHECK((g - go).norm() <= 1e-11 * go.norm());
  }
  // A source at the evaluation point is skipped.
  SourceCloud one;
  one.push(0, 0, 0, 1.0);
  one.push(1, 0, 0, 2.0);
  CHECK(inverse_distance_sum(Isa::scalar, one, Vec3::Zero()) == doctest::Approx(2.0));
}

TEST_CASE("SIMD point-source sums are equivalent to the scalar reference") {
  std::mt19937 rng(2);
  for (Isa isa : available_simd()) {
    CAPTURE(isa_name(isa));
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
                          std::size_t{64}, std::size_t{1003}}) {
      const SourceCloud c = random_cloud(n, rng);
      for (double m3 : {1.0, 0.3}) {
        const Vec3 p(0.1, 0.4, -0.25);
        const double ref = inverse_distance_sum(Isa::scalar, c, p, m3);
        const double got = inverse_distance_sum(isa, c, p, m3);
        CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
        const Vec3 gr = inverse_distance_gradient(Isa::scalar, c, p, m3);
        const Vec3 gs = inverse_distance_gradient(isa, c, p, m3);
        CHECK((gr - gs).norm() <= 1e-12 * std::max(1.0, gr.norm()));
      }
    }
  }
}

TEST_CASE("SIMD red-black sweeps are equivalent to the scalar reference") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Isa isa : available_simd()) {
    CAPTURE(isa_name(isa));
    for (int nx : {5, 8, 13, 17}) {
      const int ny = nx + 1, nz = nx + 2;
      std::vector<double> phi(static_cast<std::size_t>(nx) * ny * nz), V(phi.size());
      for (double& v : phi) v = u(rng) * 0.5;
      for (std::size_t i = 0; i < V.size(); ++i) V[i] = std::max(phi[i], u(rng));
      std::vector<double> Vs = V, Vv = V;
      for (int sweep = 0; sweep < 6; ++sweep) {
        const int color = sweep % 2;
        const double ds = psor_color_sweep(Isa::scalar, Vs.data(), phi.data(), nx, ny, 1, nz - 1, color, 1.5);
        const double dv = psor_color_sweep(isa, Vv.data(), phi.data(), nx, ny, 1, nz - 1, color, 1.5);
        CHECK(dv == doctest::Approx(ds).epsilon(1e-13));
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < Vs.size(); ++i) worst = std::max(worst, std::abs(Vs[i] - Vv[i]));
      CHECK(worst <= 1e-13);
    }
  }
}

TEST_CASE("scalar sweep matches a direct transcription of the update") {
  const int nx = 6, ny = 5, nz = 7;
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> phi(static_cast<std::size_t>(nx) * ny * nz), V(phi.size());
  for (double& v : phi) v = u(rng);
  for (double& v : V) v = u(rng);
  std::vector<double> ref = V;
  auto at = [&](std::vector<double>& a, int i, int j, int k) -> double& {
    return a[static_cast<std::size_t>(i + nx * (j + ny * k))];
  };
  const double omega = 1.3;
  double max_update = 0.0;
  for (int k = 1; k < nz - 1; ++k)
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        if ((i + j + k) % 2 != 1) continue;
        const double mean = (at(ref, i - 1, j, k) + at(ref, i + 1, j, k) + at(ref, i, j - 1, k) +
                             at(ref, i, j + 1, k) + at(ref, i, j, k - 1) + at(ref, i, j, k + 1)) /
                            6.0;
        const double old = at(ref, i, j, k);
        const double nv = std::max(at(phi, i, j, k), old + omega * (mean - old));
        max_update = std::max(max_update, std::abs(nv - old));
        at(ref, i, j, k) = nv;
      }
  const double d = psor_color_sweep(Isa::scalar, V.data(), phi.data(), nx, ny, 1, nz - 1, 1, omega);
  CHECK(d == doctest::Approx(max_update).epsilon(1e-14));
  for (std::size_t i = 0; i < V.size(); ++i) CHECK(V[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}
