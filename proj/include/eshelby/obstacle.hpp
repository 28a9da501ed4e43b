#pragma once

#include "eshelby/common.hpp"

#include <optional>
#include <string>

namespace eshelby {

// Obstacle families:
//   quartic          phi = C - (x1^4+x2^4+x3^4)/12 on U = {sum x^4 <= 48 C}, -3C outside
//   quartic_log      quartic + omega*(x1, x2)
//   even_degree_log  C_hat - sum x^(n+2)/((n+1)(n+2)) + omega* on
//                    U_hat = {sum x^(n+2) <= 2(n+1)(n+2) C_hat}, -C_hat + omega* outside
//   constant         phi = value everywhere (test fixture for empty contact sets)
// omega* is the clamped logarithm centred at (12 sqrt C, 12 sqrt C) with
// clamp radii 6 sqrt C and 18 sqrt C.
enum class ObstacleFamily { quartic, quartic_log, even_degree_log, constant };

std::string to_string(ObstacleFamily f);
ObstacleFamily obstacle_family_from_string(const std::string& s);

struct ObstacleSpec {
  ObstacleFamily family = ObstacleFamily::quartic;
  double C = 1.0 / 36.0;
  double beta = 0.0;
  int n = 4;
  double C_hat = 1.0 / 36.0;
  double value = -1.0;  // constant family only
};

// Validated constructors (DomainError on C <= 0, beta <= 0, odd or small n, ...).
ObstacleSpec make_quartic_obstacle(double C);
ObstacleSpec make_quartic_log_obstacle(double C, double beta);
ObstacleSpec make_even_degree_log_obstacle(int n, double C_hat, double beta, double C);
ObstacleSpec make_constant_obstacle(double value);
void validate_spec(const ObstacleSpec& spec);

double omega_star(double C, double beta, double x1, double x2);
double eval_obstacle(const ObstacleSpec& spec, const Vec3& x);

// Laplacian of the obstacle's smooth piece, i.e. the density rho whose
// Newtonian potential reproduces the obstacle on the coincidence set:
// -sum x_k^2 (quartic families), -sum x_k^n (even family), 0 otherwise.
// omega* is harmonic away from its clamp circles and contributes nothing.
double obstacle_density(const ObstacleSpec& spec, const Vec3& x);
// True when x lies in the support set U (or U_hat) of the polynomial piece.
bool in_support_set(const ObstacleSpec& spec, const Vec3& x);

// Nominal support radius: 6 sqrt C (quartic families) or
// (2(n+1)(n+2) C_hat)^(1/(n+2)) (even family); 0 for a non-positive constant.
double nominal_r0(const ObstacleSpec& spec);
// Largest |x| at which the polynomial piece can still be positive; beyond
// max(nominal_r0, this) the obstacle is certainly non-positive.
double nonpositive_radius(const ObstacleSpec& spec);
// Extent of U (or U_hat) along a coordinate axis.
double support_axis_extent(const ObstacleSpec& spec);
// Default solver half-width 1.25 * max(nominal r0, axis extent of U); 1 when
// both vanish (constant family).
double default_half_width(const ObstacleSpec& spec);

struct ObstacleViolation {
  int condition = 0;  // 1..4
  Vec3 point = Vec3::Zero();
  std::string message;
};

struct ObstacleReport {
  double lipschitz_bound = 0.0;          // max sampled |grad phi| (condition 1)
  double r0 = 0.0;                       // nominal radius
  double r0_effective = 0.0;             // radius used for condition 2
  bool nominal_r0_sufficient = false;    // phi <= 0 already beyond the nominal radius
  double max_positive_beyond_r0 = 0.0;   // largest phi sampled with |x| >= r0_effective
  double max_laplacian = 0.0;            // max |Laplacian| on B_r0 (condition 3)
  double semiconvexity_constant = 0.0;   // C^phi: 1.5 x sampled sup of |D phi| + |D^2 phi| (condition 4)
  double min_second_difference = 0.0;   // min of d^2 phi/dzeta^2 + C^phi on B_r0
  double global_min_second_difference = 0.0;  // same over the whole sample box (diagnostic)
  Vec3 global_min_location = Vec3::Zero();
  bool condition[4] = {false, false, false, false};
  bool all_conditions_pass = false;
  std::optional<ObstacleViolation> first_violation;
  long samples = 0;
};

// Numerical check of the four obstacle-function conditions. `resolution` is
// the number of grid samples per axis; condition 2 uses resolution^3 random
// samples in the shell r0_effective <= |x| <= 3 r0_effective.
ObstacleReport validate_obstacle(const ObstacleSpec& spec, int resolution = 41);

}  // namespace eshelby
