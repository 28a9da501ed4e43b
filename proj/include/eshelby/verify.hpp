#pragma once

#include "eshelby/common.hpp"
#include "eshelby/ellipsoid_potential.hpp"
#include "eshelby/materials.hpp"
#include "eshelby/region.hpp"
#include "eshelby/voxel_quadrature.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eshelby {

// Density polynomials:
//   constant       rho = c0
//   quadratic      rho = -(c1 x1^2 + c2 x2^2 + c3 x3^2)
//   even_monomial  rho = -(d1 x1^n + d2 x2^n + d3 x3^n), n even >= 2
enum class DensityForm { constant, quadratic, even_monomial };

std::string to_string(DensityForm f);
DensityForm density_form_from_string(const std::string& s);

struct DensityPolynomial {
  DensityForm form = DensityForm::constant;
  double c0 = 1.0;                 // constant form
  Vec3 coeffs = Vec3::Ones();      // c (quadratic) or d (even_monomial)
  int degree = 0;                  // 0, 2 or n

  double operator()(const Vec3& x) const;
};

DensityPolynomial constant_density(double c0 = 1.0);
DensityPolynomial quadratic_density(const Vec3& c = Vec3::Ones());
DensityPolynomial even_monomial_density(int n, const Vec3& d = Vec3::Ones());
// Throws DomainError for an odd/negative degree or a degree inconsistent
// with the form.
void validate_density(const DensityPolynomial& rho);

// Newtonian potential N(x) = -int_Omega rho(y) / (4 pi |x - y|) dy of a
// voxel region: far cells as point masses rho(y_c) h^3, the cells around x
// integrated exactly (closed-form cube integrals of 1/|x-y| weighted by the
// centre density).
class PotentialQuadrature {
 public:
  PotentialQuadrature(const VoxelRegion& region, const DensityPolynomial& rho);

  double value(const Vec3& x) const;
  // Central-difference Hessian with per-axis steps.
  Mat3 hessian(const Vec3& x, const Vec3& step) const;
  const VoxelRegion& region() const { return region_; }

 private:
  VoxelRegion region_;
  std::unique_ptr<VoxelIntegrator> integrator_;  // null for an empty region
};

double potential_quadrature(const VoxelRegion& region, const DensityPolynomial& rho, const Vec3& x);

struct HessianSamples {
  std::vector<Mat3> hessian;  // symmetrised
  std::vector<bool> flagged;  // within two cells of the region boundary
  Vec3 step = Vec3::Zero();
};

// Hessians of the quadrature potential at the given points with step
// 2 * spacing per axis. Points whose (5 x 5 x 5)-cell neighbourhood is not
// entirely inside or entirely outside the region are flagged: the
// finite-difference stencil then straddles the voxelized boundary.
HessianSamples hessian_field(const VoxelRegion& region, const DensityPolynomial& rho, const std::vector<Vec3>& points);
HessianSamples hessian_field(const PotentialQuadrature& potential, const std::vector<Vec3>& points);

// Hessian-to-strain maps. H is the Hessian of the Newtonian potential of the
// stretched region at x' = Q x.
//   cubic        eps = (1/(2 C44)) (Q H Q P + P Q H Q),  Q = diag(1, 1, t)
//   transiso     C13 + C44 = 0: as cubic with t = sqrt(C44/C33);
//                otherwise eps = (1/2)(K* Q H Q + Q H Q K*), Q = diag(1, 1, v1),
//                K* = diag(1/C11, 1/C11, (C11 - C44 v^2)/(v^2 (C13 + C44) C11))
//   ortho_mono   eps = (1/(2 C33)) (Q H Q P + P Q H Q),  Q = diag(s1, s2, 1)
//   isotropic    eps = (3 lambda + 2 mu)/(lambda + 2 mu) H  (lambda = C12, mu = C44)
//   general_even eps = (1/2)(Q H Q P + P Q H Q) with Q = stretch_diagonal(C);
//                fixed only up to a material constant (scale-free).
// The eigenstress is rho(x) times the unit uniaxial state P (transiso:
// sigma11 = 1, sigma33 = gamma).
enum class StrainCase { cubic, transiso, ortho_mono, isotropic, general_even };

std::string to_string(StrainCase c);
StrainCase strain_case_from_string(const std::string& s);
// True when the case only determines the strain up to a constant factor.
bool is_scale_free(StrainCase c);

// Stretch diagonal q (x' = diag(q) x) used by the case; throws DomainError
// when the tensor's symmetry class does not provide the factors the case
// needs (see scale_factors).
Vec3 strain_case_stretch(StrainCase c, const ElasticTensor& C);

Mat3 strain_from_hessian(StrainCase c, const Mat3& H, const ElasticTensor& C, const Mat3& P);
// Same with an explicit stretch diagonal q replacing the one derived from C.
Mat3 strain_from_hessian(StrainCase c, const Mat3& H, const ElasticTensor& C, const Mat3& P, const Vec3& q);
std::vector<Mat3> strain_from_hessian(StrainCase c, const std::vector<Mat3>& H, const ElasticTensor& C,
                                      const Mat3& P);

struct EigenstrainSpec {
  Mat3 P = Vec3(0.0, 0.0, 1.0) * Vec3(0.0, 0.0, 1.0).transpose();  // uniaxial direction e3 (x) e3
  DensityPolynomial density;  // expressed in the stretched frame x'
  StrainCase strain_case = StrainCase::isotropic;
};

// P must be symmetric, rank one, with entries in {0, 1}. Throws DomainError.
void validate_eigenstrain(const EigenstrainSpec& spec);
// P = e_axis (x) e_axis, axis in 0..2.
Mat3 uniaxial_direction(int axis);

// Least-squares fit in the monomial basis of total degree <= degree.
// Ordering is graded lexicographic: by total degree, then by descending
// exponent of x1, then of x2. Coordinates are normalised as
// (x - center) / scale before evaluation; the fit is reported in those
// normalised coordinates.
struct PolynomialFit {
  int degree = 0;
  std::vector<std::array<int, 3>> exponents;
  Eigen::VectorXd coeffs;
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
  double rms_residual = 0.0;
  double relative_residual = 0.0;  // rms residual / rms of the samples
  double residual_sq = 0.0;        // sum of squared residuals
  double value_sq = 0.0;           // sum of squared sample values
  std::vector<double> degree_norms;  // rms over the samples of the part of each total degree
  double condition_number = 0.0;

  double evaluate(const Vec3& x) const;
};

std::vector<std::array<int, 3>> monomial_exponents(int degree);

// Throws InputError when there are fewer than twice as many samples as basis
// functions, DomainError (with the condition number) for a rank-deficient
// design.
PolynomialFit fit_polynomial(const std::vector<Vec3>& points, const std::vector<double>& values, int degree);

struct CertifyOptions {
  double tol_cert = 0.05;
  int depth = 3;                 // samples at least this many cells inside (the 2h stencil then stays one cell clear of the boundary layer)
  std::size_t max_samples = 1500;
  std::optional<Vec3> stretch;   // overrides strain_case_stretch
};

struct CertificationReport {
  std::string strain_case;
  int degree = 0;
  double tol_cert = 0.0;
  double residual_n = 0.0;           // relative rms residual at degree n
  double residual_n1 = 0.0;          // relative rms residual at degree n + 1
  double incremental_energy = 0.0;   // (R_n^2 - R_{n+1}^2) / F^2
  double field_rms = 0.0;
  std::array<double, 6> component_rms{};  // 11, 22, 33, 23, 13, 12
  std::vector<double> degree_norms;  // summed over components, at degree n
  bool scale_free = false;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t flagged_samples = 0;
  Vec3 stretch = Vec3::Ones();
  // Per-sample data for plotting: physical point, strain, fitted strain.
  std::vector<Vec3> points;
  std::vector<Mat3> strain;
  std::vector<Mat3> fitted;
};

// Strain samples inside the physical region: for every voxel centre x at
// least `depth` cells inside, the Hessian of N over the stretched region
// Omega' = diag(q) Omega at x' = diag(q) x is mapped to a strain. Each strain
// component is fitted at the density degree n and at n + 1.
// PASS iff residual_n <= tol_cert and incremental_energy <= tol_cert.
// Throws InputError for an empty region or too few interior samples.
CertificationReport certify_polynomial_conservation(const VoxelRegion& region, const ElasticTensor& C,
                                                    const EigenstrainSpec& eigenstrain,
                                                    const CertifyOptions& options = {});

struct NonEllipsoidalityReport {
  double score = 0.0;
  double symmetric_difference = 0.0;
  double potential_mismatch = 0.0;  // rms(N_region - N_ellipsoid) / range(N_ellipsoid)
  EllipsoidPose pose;
  std::size_t samples = 0;
};

// Fits an ellipsoid by moments and compares both the occupancy and the
// interior potential (quadratic or constant density) with the fitted
// ellipsoid. score = max(symmetric_difference, potential_mismatch).
// Throws InputError for an unsupported density, DomainError from the fit.
NonEllipsoidalityReport non_ellipsoidality_score(const VoxelRegion& region, const DensityPolynomial& rho,
                                                 int depth = 2, std::size_t max_samples = 400);

}  // namespace eshelby
