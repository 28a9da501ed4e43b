#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eshelby/obstacle.hpp"

#include <cmath>
#include <random>

using namespace eshelby;

namespace {

double fd_laplacian(const ObstacleSpec& s, const Vec3& x, double h = 1e-3) {
  double lap = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i) * h;
    lap += (eval_obstacle(s, x + e) - 2.0 * eval_obstacle(s, x) + eval_obstacle(s, x - e)) / (h * h);
  }
  return lap;
}

}  // namespace

TEST_CASE("quartic obstacle values") {
  const ObstacleSpec s = make_quartic_obstacle(1.0 / 36.0);
  CHECK(eval_obstacle(s, Vec3::Zero()) == doctest::Approx(1.0 / 36.0));
  const Vec3 x(0.3, -0.2, 0.5);
  const double p = std::pow(0.3, 4) + std::pow(0.2, 4) + std::pow(0.5, 4);
  CHECK(eval_obstacle(s, x) == doctest::Approx(1.0 / 36.0 - p / 12.0).epsilon(1e-15));
  // Outside U the obstacle is the constant -3C, continuous across sum x^4 = 48 C.
  const double edge = std::pow(48.0 / 36.0, 0.25);
  CHECK(eval_obstacle(s, Vec3(edge * (1 - 1e-9), 0, 0)) == doctest::Approx(-3.0 / 36.0).epsilon(1e-7));
  CHECK(eval_obstacle(s, Vec3(2, 0, 0)) == doctest::Approx(-3.0 / 36.0));
  CHECK(nominal_r0(s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("the obstacle density is the Laplacian of the smooth piece") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const ObstacleSpec q = make_quartic_obstacle(1.0 / 36.0);
  const ObstacleSpec e = make_even_degree_log_obstacle(4, 1.0 / 36.0, 1.0 / 600.0, 1.0 / 36.0);
  for (int t = 0; t < 20; ++t) {
    const Vec3 x(u(rng), u(rng), u(rng));
    CHECK(fd_laplacian(q, x) == doctest::Approx(obstacle_density(q, x)).epsilon(1e-5));
    CHECK(obstacle_density(q, x) == doctest::Approx(-x.squaredNorm()));
    CHECK(obstacle_density(e, x) == doctest::Approx(-(std::pow(x[0], 4) + std::pow(x[1], 4) + std::pow(x[2], 4))));
  }
  // omega* is harmonic in the annulus between its clamp circles.
  const ObstacleSpec ql = make_quartic_log_obstacle(1.0 / 36.0, 0.01);
  const double c = 12.0 * std::sqrt(1.0 / 36.0);
  for (double r : {1.2, 1.6, 2.5}) {
    const double x1 = c + r * std::cos(0.7), x2 = c + r * std::sin(0.7);
    const double h = 1e-3;
    const double lap = (omega_star(ql.C, ql.beta, x1 + h, x2) + omega_star(ql.C, ql.beta, x1 - h, x2) +
                        omega_star(ql.C, ql.beta, x1, x2 + h) + omega_star(ql.C, ql.beta, x1, x2 - h) -
                        4.0 * omega_star(ql.C, ql.beta, x1, x2)) /
                       (h * h);
    CHECK(std::abs(lap) <= 1e-5);
  }
}

TEST_CASE("omega* clamps") {
  const double C = 1.0 / 36.0, beta = 1.0 / 600.0;
  const double c = 12.0 * std::sqrt(C);
  CHECK(omega_star(C, beta, c, c) == 0.0);
  CHECK(omega_star(C, beta, c + 0.99, c) == 0.0);  // inside radius 6 sqrt C = 1
  CHECK(omega_star(C, beta, c + 3.5, c) == doctest::Approx(-beta * std::log(9.0)));
  CHECK(omega_star(C, beta, c + 2.0, c) == doctest::Approx(-beta * std::log(4.0)));
  // Continuous across both clamp circles.
  CHECK(omega_star(C, beta, c + 1.0 + 1e-12, c) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(omega_star(C, beta, c + 3.0 - 1e-12, c) == doctest::Approx(-beta * std::log(9.0)).epsilon(1e-9));
}

TEST_CASE("even-degree family") {
  const ObstacleSpec s = make_even_degree_log_obstacle(4, 1.0 / 36.0, 1.0 / 600.0, 1.0 / 36.0);
  const Vec3 x(0.2, 0.1, -0.4);
  const double p6 = std::pow(0.2, 6) + std::pow(0.1, 6) + std::pow(0.4, 6);
  CHECK(eval_obstacle(s, x) == doctest::Approx(1.0 / 36.0 - p6 / 30.0 + omega_star(s.C, s.beta, 0.2, 0.1)));
  CHECK(nominal_r0(s) == doctest::Approx(std::pow(2.0 * 5.0 * 6.0 / 36.0, 1.0 / 6.0)).epsilon(1e-14));
  CHECK(default_half_width(s) > nominal_r0(s));
}

TEST_CASE("obstacle conditions hold for the construction parameters") {
  const ObstacleReport q = validate_obstacle(make_quartic_obstacle(1.0 / 36.0), 31);
  CHECK(q.all_conditions_pass);
  CHECK(q.nominal_r0_sufficient);
  CHECK(q.max_positive_beyond_r0 <= 0.0);
  CHECK(q.max_laplacian == doctest::Approx(1.0).epsilon(0.05));  // |x|^2 on the unit ball

  const ObstacleReport e =
      validate_obstacle(make_even_degree_log_obstacle(4, 1.0 / 36.0, 1.0 / 600.0, 1.0 / 36.0), 31);
  for (int c = 0; c < 4; ++c) {
    CAPTURE(c);
    CHECK(e.condition[c]);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_quartic_obstacle(0.0), DomainError);
  CHECK_THROWS_AS(make_quartic_obstacle(-1.0), DomainError);
  CHECK_THROWS_AS(make_quartic_log_obstacle(1.0 / 36.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_even_degree_log_obstacle(3, 1.0 / 36.0, 0.01, 1.0 / 36.0), DomainError);
  CHECK_THROWS_AS(obstacle_family_from_string("cubic"), InputError);
  CHECK(obstacle_family_from_string("even_degree_log") == ObstacleFamily::even_degree_log);
  const ObstacleSpec k = make_constant_obstacle(-1.0);
  CHECK(eval_obstacle(k, Vec3(5, 5, 5)) == -1.0);
  CHECK(default_half_width(k) > 0.0);
}
