#include "eshelby/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace eshelby {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double power_sum(const Vec3& x, int p) { return ipow(x[0], p) + ipow(x[1], p) + ipow(x[2], p); }

// Unit directions used for directional derivatives: 3 axes, 6 face
// diagonals and 4 body diagonals.
std::vector<Vec3> probe_directions() {
  std::vector<Vec3> d;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        Vec3 v(i, j, k);
        if (v.squaredNorm() == 0) continue;
        // keep one representative of each +-v pair
        const int first = i != 0 ? i : (j != 0 ? j : k);
        if (first < 0) continue;
        d.push_back(v.normalized());
      }
  return d;
}

}  // namespace

std::string to_string(ObstacleFamily f) {
  switch (f) {
    case ObstacleFamily::quartic: return "quartic";
    case ObstacleFamily::quartic_log: return "quartic_log";
    case ObstacleFamily::even_degree_log: return "even_degree_log";
    case ObstacleFamily::constant: return "constant";
  }
  return "unknown";
}

ObstacleFamily obstacle_family_from_string(const std::string& s) {
  if (s == "quartic") return ObstacleFamily::quartic;
  if (s == "quartic_log") return ObstacleFamily::quartic_log;
  if (s == "even_degree_log") return ObstacleFamily::even_degree_log;
  if (s == "constant") return ObstacleFamily::constant;
  throw InputError("unknown obstacle family '" + s + "'");
}

void validate_spec(const ObstacleSpec& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("obstacle: ") + name + " must be positive");
  };
  switch (s.family) {
    case ObstacleFamily::quartic:
      positive(s.C, "C");
      break;
    case ObstacleFamily::quartic_log:
      positive(s.C, "C");
      positive(s.beta, "beta");
      break;
    case ObstacleFamily::even_degree_log:
      positive(s.C, "C");
      positive(s.C_hat, "C_hat");
      positive(s.beta, "beta");
      if (s.n < 4 || s.n % 2 != 0) throw DomainError("obstacle: n must be an even integer >= 4");
      break;
    case ObstacleFamily::constant:
      if (!std::isfinite(s.value)) throw DomainError("obstacle: constant value must be finite");
      break;
  }
}

ObstacleSpec make_quartic_obstacle(double C) {
  ObstacleSpec s;
  s.family = ObstacleFamily::quartic;
  s.C = C;
  validate_spec(s);
  return s;
}

ObstacleSpec make_quartic_log_obstacle(double C, double beta) {
  ObstacleSpec s;
  s.family = ObstacleFamily::quartic_log;
  s.C = C;
  s.beta = beta;
  validate_spec(s);
  return s;
}

ObstacleSpec make_even_degree_log_obstacle(int n, double C_hat, double beta, double C) {
  ObstacleSpec s;
  s.family = ObstacleFamily::even_degree_log;
  s.n = n;
  s.C_hat = C_hat;
  s.beta = beta;
  s.C = C;
  validate_spec(s);
  return s;
}

ObstacleSpec make_constant_obstacle(double value) {
  ObstacleSpec s;
  s.family = ObstacleFamily::constant;
  s.value = value;
  validate_spec(s);
  return s;
}

double omega_star(double C, double beta, double x1, double x2) {
  const double c = 12.0 * std::sqrt(C);
  const double d2 = (x1 - c) * (x1 - c) + (x2 - c) * (x2 - c);
  const double inner = 36.0 * C;
  const double outer = 324.0 * C;
  if (d2 <= inner) return 0.0;
  if (d2 >= outer) return -beta * std::log(9.0);
  return -beta * std::log(d2 / inner);
}

bool in_support_set(const ObstacleSpec& s, const Vec3& x) {
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log:
      return power_sum(x, 4) <= 48.0 * s.C;
    case ObstacleFamily::even_degree_log:
      return power_sum(x, s.n + 2) <= 2.0 * (s.n + 1) * (s.n + 2) * s.C_hat;
    case ObstacleFamily::constant:
      return true;
  }
  return false;
}

double eval_obstacle(const ObstacleSpec& s, const Vec3& x) {
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log: {
      const double p = power_sum(x, 4);
      double v = p <= 48.0 * s.C ? s.C - p / 12.0 : -3.0 * s.C;
      if (s.family == ObstacleFamily::quartic_log) v += omega_star(s.C, s.beta, x[0], x[1]);
      return v;
    }
    case ObstacleFamily::even_degree_log: {
      const int m = s.n + 2;
      const double k = (s.n + 1.0) * (s.n + 2.0);
      const double p = power_sum(x, m);
      const double v = p <= 2.0 * k * s.C_hat ? s.C_hat - p / k : -s.C_hat;
      return v + omega_star(s.C, s.beta, x[0], x[1]);
    }
    case ObstacleFamily::constant:
      return s.value;
  }
  return 0.0;
}

double obstacle_density(const ObstacleSpec& s, const Vec3& x) {
  if (!in_support_set(s, x)) return 0.0;
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log:
      return -x.squaredNorm();
    case ObstacleFamily::even_degree_log:
      return -power_sum(x, s.n);
    case ObstacleFamily::constant:
      return 0.0;
  }
  return 0.0;
}

double nominal_r0(const ObstacleSpec& s) {
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log:
      return 6.0 * std::sqrt(s.C);
    case ObstacleFamily::even_degree_log:
      return std::pow(2.0 * (s.n + 1) * (s.n + 2) * s.C_hat, 1.0 / (s.n + 2));
    case ObstacleFamily::constant:
      return 0.0;
  }
  return 0.0;
}

double nonpositive_radius(const ObstacleSpec& s) {
  // The polynomial piece C - sum x^m / k is largest, at fixed |x| = r, along
  // a body diagonal where sum x^m = 3 (r^2/3)^(m/2).
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log:
      return std::pow(36.0 * s.C, 0.25);
    case ObstacleFamily::even_degree_log: {
      const int m = s.n + 2;
      const double k = (s.n + 1.0) * (s.n + 2.0);
      return std::pow(k * s.C_hat * std::pow(3.0, s.n / 2.0), 1.0 / m);
    }
    case ObstacleFamily::constant:
      return s.value <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double support_axis_extent(const ObstacleSpec& s) {
  switch (s.family) {
    case ObstacleFamily::quartic:
    case ObstacleFamily::quartic_log:
      return std::pow(48.0 * s.C, 0.25);
    case ObstacleFamily::even_degree_log:
      return nominal_r0(s);
    case ObstacleFamily::constant:
      return 1.0;
  }
  return 1.0;
}

double default_half_width(const ObstacleSpec& s) {
  const double w = 1.25 * std::max(nominal_r0(s), support_axis_extent(s));
  return w > 0.0 ? w : 1.0;  // the constant family has no natural length scale
}

namespace {
constexpr double kSemiconvexitySafety = 1.5;
}  // namespace

ObstacleReport validate_obstacle(const ObstacleSpec& spec, int resolution) {
  validate_spec(spec);
  if (resolution < 3) throw InputError("validate_obstacle: resolution must be >= 3");
  ObstacleReport r;
  r.r0 = nominal_r0(spec);
  const double r_np = nonpositive_radius(spec);
  r.r0_effective = std::max(r.r0, r_np);
  const double scale_r = r.r0_effective > 0 && std::isfinite(r.r0_effective) ? r.r0_effective : 1.0;
  const double h = 1e-4 * (r.r0 > 0 ? r.r0 : scale_r);
  auto phi = [&](const Vec3& x) { return eval_obstacle(spec, x); };
  auto fail = [&](int cond, const Vec3& x, const std::string& msg) {
    r.condition[cond - 1] = false;
    if (!r.first_violation) r.first_violation = ObstacleViolation{cond, x, msg};
  };
  for (bool& c : r.condition) c = true;

  const std::vector<Vec3> dirs = probe_directions();
  const double box = 1.5 * scale_r;
  const int N = resolution;
  std::vector<Vec3> grid;
  grid.reserve(static_cast<std::size_t>(N) * N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const double t = 2.0 / (N - 1);
        grid.emplace_back(box * (-1 + i * t), box * (-1 + j * t), box * (-1 + k * t));
      }

  // Condition 1: value and gradient finite (Lipschitz proxy).
  for (const Vec3& x : grid) {
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = h;
      g[a] = (phi(x + e) - phi(x - e)) / (2 * h);
    }
    const double v = phi(x);
    if (!std::isfinite(v) || !g.allFinite()) {
      fail(1, x, "non-finite value or gradient");
      continue;
    }
    r.lipschitz_bound = std::max(r.lipschitz_bound, g.norm());
  }

  // Condition 2: phi <= 0 beyond the effective radius.
  r.nominal_r0_sufficient = r_np <= r.r0;
  {
    std::mt19937_64 rng(20240611ULL);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const long M = static_cast<long>(N) * N * N;
    r.max_positive_beyond_r0 = -std::numeric_limits<double>::infinity();
    for (long m = 0; m < M; ++m) {
      Vec3 dir(nd(rng), nd(rng), nd(rng));
      dir.normalize();
      const double rad = scale_r * (1.0 + 2.0 * ud(rng));
      const Vec3 x = rad * dir;
      const double v = phi(x);
      r.max_positive_beyond_r0 = std::max(r.max_positive_beyond_r0, v);
      if (v > 1e-12) fail(2, x, "obstacle positive beyond r0");
    }
    r.samples += M;
  }

  // Conditions 3 and 4 on B_r0 (nominal radius; the obstacle is smooth there).
  const double rin = r.r0 > 0 ? r.r0 : scale_r;
  double sup_d1 = 0.0, sup_d2 = 0.0;
  std::vector<const Vec3*> inside;
  for (const Vec3& x : grid) {
    if (x.norm() > rin) continue;
    inside.push_back(&x);
    double lap = 0.0;
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = h;
      lap += (phi(x + e) - 2 * phi(x) + phi(x - e)) / (h * h);
    }
    if (!std::isfinite(lap)) fail(3, x, "non-finite Laplacian");
    r.max_laplacian = std::max(r.max_laplacian, std::abs(lap));
    for (const Vec3& z : dirs) {
      sup_d1 = std::max(sup_d1, std::abs((phi(x + h * z) - phi(x - h * z)) / (2 * h)));
      sup_d2 = std::max(sup_d2, std::abs((phi(x + h * z) - 2 * phi(x) + phi(x - h * z)) / (h * h)));
    }
  }
  r.samples += static_cast<long>(grid.size());
  // The sampled sup under-estimates the true sup between samples; the safety
  // factor keeps smooth curvature from registering as a violation while a
  // concave kink (second difference ~ -jump / h) still fails.
  r.semiconvexity_constant = kSemiconvexitySafety * (sup_d1 + sup_d2);
  const double Cphi = r.semiconvexity_constant;
  const double tol = 1e-6 * std::max(1.0, Cphi);
  // Semiconvexity check of phi + C^phi |x|^2 / 2 on a grid staggered from
  // the estimation grid, so the check is not evaluated at the same points.
  r.min_second_difference = std::numeric_limits<double>::infinity();
  r.global_min_second_difference = std::numeric_limits<double>::infinity();
  const double shift = box / (N - 1);
  auto psi = [&](const Vec3& x) { return phi(x) + 0.5 * Cphi * x.squaredNorm(); };
  for (const Vec3& x0 : grid) {
    const Vec3 x = x0 + Vec3(shift, shift, shift) * 0.5;
    for (const Vec3& z : dirs) {
      const double d2 = (psi(x + h * z) - 2 * psi(x) + psi(x - h * z)) / (h * h);
      if (d2 < r.global_min_second_difference) {
        r.global_min_second_difference = d2;
        r.global_min_location = x;
      }
      if (x.norm() <= rin) {
        r.min_second_difference = std::min(r.min_second_difference, d2);
        if (d2 < -tol) fail(4, x, "semiconvexity violated");
      }
    }
  }
  if (inside.empty()) r.min_second_difference = 0.0;
  r.all_conditions_pass = r.condition[0] && r.condition[1] && r.condition[2] && r.condition[3];
  return r;
}

}  // namespace eshelby
