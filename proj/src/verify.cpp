#include "eshelby/verify.hpp"

#include "eshelby/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eshelby {

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

std::string to_string(DensityForm f) {
  switch (f) {
    case DensityForm::constant:
      return "constant";
    case DensityForm::quadratic:
      return "quadratic";
    case DensityForm::even_monomial:
      return "even_monomial";
  }
  return "constant";
}

DensityForm density_form_from_string(const std::string& s) {
  if (s == "constant") return DensityForm::constant;
  if (s == "quadratic") return DensityForm::quadratic;
  if (s == "even_monomial") return DensityForm::even_monomial;
  throw InputError("unknown density form '" + s + "' (expected constant, quadratic or even_monomial)");
}

double DensityPolynomial::operator()(const Vec3& x) const {
  switch (form) {
    case DensityForm::constant:
      return c0;
    case DensityForm::quadratic:
      return -(coeffs[0] * x[0] * x[0] + coeffs[1] * x[1] * x[1] + coeffs[2] * x[2] * x[2]);
    case DensityForm::even_monomial: {
      double s = 0.0;
      for (int a = 0; a < 3; ++a) s += coeffs[a] * std::pow(x[a], degree);
      return -s;
    }
  }
  return 0.0;
}

DensityPolynomial constant_density(double c0) {
  DensityPolynomial r;
  r.form = DensityForm::constant;
  r.c0 = c0;
  r.degree = 0;
  return r;
}

DensityPolynomial quadratic_density(const Vec3& c) {
  DensityPolynomial r;
  r.form = DensityForm::quadratic;
  r.coeffs = c;
  r.degree = 2;
  return r;
}

DensityPolynomial even_monomial_density(int n, const Vec3& d) {
  DensityPolynomial r;
  r.form = DensityForm::even_monomial;
  r.coeffs = d;
  r.degree = n;
  validate_density(r);
  return r;
}

void validate_density(const DensityPolynomial& rho) {
  const bool even = rho.degree >= 0 && rho.degree % 2 == 0;
  if (!even) throw DomainError("density degree must be even and non-negative");
  switch (rho.form) {
    case DensityForm::constant:
      if (rho.degree != 0) throw DomainError("constant density has degree 0");
      if (!std::isfinite(rho.c0)) throw DomainError("constant density must be finite");
      break;
    case DensityForm::quadratic:
      if (rho.degree != 2) throw DomainError("quadratic density has degree 2");
      break;
    case DensityForm::even_monomial:
      if (rho.degree < 2) throw DomainError("even monomial density needs degree >= 2");
      break;
  }
  if (!rho.coeffs.allFinite()) throw DomainError("density coefficients must be finite");
}

// ---------------------------------------------------------------------------
// Potential quadrature and Hessians
// ---------------------------------------------------------------------------

PotentialQuadrature::PotentialQuadrature(const VoxelRegion& region, const DensityPolynomial& rho) : region_(region) {
  validate_density(rho);
  if (!region.empty())
    integrator_ = std::make_unique<VoxelIntegrator>(region, [rho](const Vec3& y) { return rho(y); });
}

double PotentialQuadrature::value(const Vec3& x) const { return integrator_ ? integrator_->newtonian(x) : 0.0; }

Mat3 PotentialQuadrature::hessian(const Vec3& x, const Vec3& step) const {
  Mat3 H = Mat3::Zero();
  if (!integrator_) return H;
  const double f0 = value(x);
  Vec3 e[3];
  for (int a = 0; a < 3; ++a) e[a] = step[a] * Vec3::Unit(a);
  for (int a = 0; a < 3; ++a) H(a, a) = (value(x + e[a]) - 2.0 * f0 + value(x - e[a])) / (step[a] * step[a]);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const double v = (value(x + e[a] + e[b]) - value(x + e[a] - e[b]) - value(x - e[a] + e[b]) +
                        value(x - e[a] - e[b])) /
                       (4.0 * step[a] * step[b]);
      H(a, b) = H(b, a) = v;
    }
  return H;
}

double potential_quadrature(const VoxelRegion& region, const DensityPolynomial& rho, const Vec3& x) {
  return PotentialQuadrature(region, rho).value(x);
}

namespace {

// The (2 depth + 1)^3 block of cells around the cell of x is uniformly
// occupied or uniformly empty.
bool uniform_neighbourhood(const VoxelRegion& r, const Vec3& x, int depth) {
  const auto c = r.nearest_index(x);
  const bool first = r.occupied(c[0], c[1], c[2]);
  for (int dk = -depth; dk <= depth; ++dk)
    for (int dj = -depth; dj <= depth; ++dj)
      for (int di = -depth; di <= depth; ++di)
        if (r.occupied(c[0] + di, c[1] + dj, c[2] + dk) != first) return false;
  return true;
}

}  // namespace

HessianSamples hessian_field(const PotentialQuadrature& potential, const std::vector<Vec3>& points) {
  HessianSamples out;
  out.step = 2.0 * potential.region().spacing;
  out.hessian.assign(points.size(), Mat3::Zero());
  out.flagged.assign(points.size(), false);
  for (std::size_t p = 0; p < points.size(); ++p)
    out.flagged[p] = !uniform_neighbourhood(potential.region(), points[p], 2);
  parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) out.hessian[p] = potential.hessian(points[p], out.step);
  });
  return out;
}

HessianSamples hessian_field(const VoxelRegion& region, const DensityPolynomial& rho, const std::vector<Vec3>& points) {
  return hessian_field(PotentialQuadrature(region, rho), points);
}

// ---------------------------------------------------------------------------
// Hessian -> strain
// ---------------------------------------------------------------------------

std::string to_string(StrainCase c) {
  switch (c) {
    case StrainCase::cubic:
      return "cubic";
    case StrainCase::transiso:
      return "transiso";
    case StrainCase::ortho_mono:
      return "ortho_mono";
    case StrainCase::isotropic:
      return "isotropic";
    case StrainCase::general_even:
      return "general_even";
  }
  return "isotropic";
}

StrainCase strain_case_from_string(const std::string& s) {
  if (s == "cubic") return StrainCase::cubic;
  if (s == "transiso") return StrainCase::transiso;
  if (s == "ortho_mono") return StrainCase::ortho_mono;
  if (s == "isotropic") return StrainCase::isotropic;
  if (s == "general_even") return StrainCase::general_even;
  throw InputError("unknown strain case '" + s + "' (expected cubic, transiso, ortho_mono, isotropic or general_even)");
}

bool is_scale_free(StrainCase c) { return c == StrainCase::general_even; }

namespace {

void require_class(StrainCase c, const ElasticTensor& C, std::initializer_list<SymmetryClass> allowed) {
  for (SymmetryClass s : allowed)
    if (C.symmetry_class == s) return;
  throw DomainError("strain case '" + to_string(c) + "' cannot use a " + to_string(C.symmetry_class) +
                    " tensor: scale_factors provides no stretch factors of the required kind");
}

bool ti_c13_c44_zero(const ElasticTensor& C) { return check_construction_constraints(C).ti_c13_plus_c44_zero; }

}  // namespace

Vec3 strain_case_stretch(StrainCase c, const ElasticTensor& C) {
  switch (c) {
    case StrainCase::cubic:
      require_class(c, C, {SymmetryClass::cubic});
      break;
    case StrainCase::transiso:
      require_class(c, C, {SymmetryClass::transversely_isotropic});
      break;
    case StrainCase::ortho_mono:
      require_class(c, C, {SymmetryClass::orthotropic, SymmetryClass::monoclinic});
      break;
    case StrainCase::isotropic:
      require_class(c, C, {SymmetryClass::isotropic});
      return Vec3::Ones();
    case StrainCase::general_even:
      break;
  }
  const Vec3 q = stretch_diagonal(C);
  if (!q.allFinite()) throw DomainError("strain case '" + to_string(c) + "': scale_factors returned no stretch");
  return q;
}

Mat3 strain_from_hessian(StrainCase c, const Mat3& H, const ElasticTensor& C, const Mat3& P, const Vec3& q) {
  const Mat3 Q = q.asDiagonal();
  const Mat3 QHQ = Q * H * Q;
  switch (c) {
    case StrainCase::cubic:
      return (QHQ * P + P * QHQ) / (2.0 * C.C(4, 4));
    case StrainCase::transiso: {
      if (ti_c13_c44_zero(C)) return (QHQ * P + P * QHQ) / (2.0 * C.C(4, 4));
      const double C11 = C.C(1, 1), C13 = C.C(1, 3), C44 = C.C(4, 4);
      const double v = q[2], v2 = v * v;
      const Vec3 k(1.0 / C11, 1.0 / C11, (C11 - C44 * v2) / (v2 * (C13 + C44) * C11));
      const Mat3 K = k.asDiagonal();
      return 0.5 * (K * QHQ + QHQ * K);
    }
    case StrainCase::ortho_mono:
      return (QHQ * P + P * QHQ) / (2.0 * C.C(3, 3));
    case StrainCase::isotropic: {
      const double lambda = C.C(1, 2), mu = C.C(4, 4);
      return (3.0 * lambda + 2.0 * mu) / (lambda + 2.0 * mu) * H;
    }
    case StrainCase::general_even:
      return 0.5 * (QHQ * P + P * QHQ);
  }
  return Mat3::Zero();
}

Mat3 strain_from_hessian(StrainCase c, const Mat3& H, const ElasticTensor& C, const Mat3& P) {
  return strain_from_hessian(c, H, C, P, strain_case_stretch(c, C));
}

std::vector<Mat3> strain_from_hessian(StrainCase c, const std::vector<Mat3>& H, const ElasticTensor& C,
                                      const Mat3& P) {
  const Vec3 q = strain_case_stretch(c, C);
  std::vector<Mat3> out;
  out.reserve(H.size());
  for (const auto& h : H) out.push_back(strain_from_hessian(c, h, C, P, q));
  return out;
}

Mat3 uniaxial_direction(int axis) {
  if (axis < 0 || axis > 2) throw InputError("uniaxial axis must be 0, 1 or 2");
  const Vec3 e = Vec3::Unit(axis);
  return e * e.transpose();
}

void validate_eigenstrain(const EigenstrainSpec& spec) {
  validate_density(spec.density);
  const Mat3& P = spec.P;
  int ones = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (P(i, j) != P(j, i)) throw DomainError("uniaxial direction matrix P must be symmetric");
      if (P(i, j) != 0.0 && P(i, j) != 1.0) throw DomainError("uniaxial direction matrix P must have 0/1 entries");
      if (P(i, j) == 1.0) ++ones;
    }
  Eigen::JacobiSVD<Mat3> svd(P);
  const Vec3 s = svd.singularValues();
  if (ones == 0 || s[1] > 1e-12) throw DomainError("uniaxial direction matrix P must have rank one");
}

// ---------------------------------------------------------------------------
// Polynomial fitting
// ---------------------------------------------------------------------------

std::vector<std::array<int, 3>> monomial_exponents(int degree) {
  if (degree < 0) throw InputError("polynomial degree must be non-negative");
  std::vector<std::array<int, 3>> e;
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) e.push_back({a, b, d - a - b});
  return e;
}

namespace {

double monomial(const Vec3& z, const std::array<int, 3>& e) {
  double v = 1.0;
  for (int a = 0; a < 3; ++a)
    for (int p = 0; p < e[a]; ++p) v *= z[a];
  return v;
}

}  // namespace

double PolynomialFit::evaluate(const Vec3& x) const {
  const Vec3 z = (x - center) / scale;
  double v = 0.0;
  for (std::size_t m = 0; m < exponents.size(); ++m) v += coeffs[static_cast<Eigen::Index>(m)] * monomial(z, exponents[m]);
  return v;
}

PolynomialFit fit_polynomial(const std::vector<Vec3>& points, const std::vector<double>& values, int degree) {
  if (points.size() != values.size()) throw InputError("fit_polynomial: point and value counts differ");
  PolynomialFit fit;
  fit.degree = degree;
  fit.exponents = monomial_exponents(degree);
  const std::size_t nb = fit.exponents.size();
  if (points.size() < 2 * nb) {
    std::ostringstream os;
    os << "fit_polynomial: " << points.size() << " samples for " << nb << " basis functions (need at least "
       << 2 * nb << ")";
    throw InputError(os.str());
  }
  // Normalise coordinates to the unit box around the sample centroid.
  Vec3 lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  fit.center = 0.5 * (lo + hi);
  fit.scale = std::max(0.5 * (hi - lo).maxCoeff(), 1e-300);

  const Eigen::Index ns = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(ns, static_cast<Eigen::Index>(nb));
  Eigen::VectorXd y(ns);
  for (Eigen::Index r = 0; r < ns; ++r) {
    const Vec3 z = (points[static_cast<std::size_t>(r)] - fit.center) / fit.scale;
    for (std::size_t m = 0; m < nb; ++m) A(r, static_cast<Eigen::Index>(m)) = monomial(z, fit.exponents[m]);
    y[r] = values[static_cast<std::size_t>(r)];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s[0], smin = s[s.size() - 1];
  fit.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(fit.condition_number < 1e12)) {
    std::ostringstream os;
    os << "fit_polynomial: rank-deficient design at degree " << degree << " (condition number "
       << fit.condition_number << ", smallest singular value " << smin << ")";
    throw DomainError(os.str());
  }
  fit.coeffs = svd.solve(y);
  const Eigen::VectorXd r = A * fit.coeffs - y;
  fit.residual_sq = r.squaredNorm();
  fit.value_sq = y.squaredNorm();
  fit.rms_residual = std::sqrt(fit.residual_sq / static_cast<double>(ns));
  fit.relative_residual = fit.value_sq > 0.0 ? std::sqrt(fit.residual_sq / fit.value_sq) : 0.0;
  fit.degree_norms.assign(static_cast<std::size_t>(degree + 1), 0.0);
  for (int d = 0; d <= degree; ++d) {
    Eigen::VectorXd part = Eigen::VectorXd::Zero(ns);
    for (std::size_t m = 0; m < nb; ++m) {
      const auto& e = fit.exponents[m];
      if (e[0] + e[1] + e[2] == d) part += fit.coeffs[static_cast<Eigen::Index>(m)] * A.col(static_cast<Eigen::Index>(m));
    }
    fit.degree_norms[static_cast<std::size_t>(d)] = std::sqrt(part.squaredNorm() / static_cast<double>(ns));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

namespace {

constexpr int kComp[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};

std::vector<Vec3> interior_samples(const VoxelRegion& region, int depth, std::size_t max_samples) {
  std::vector<Vec3> pts;
  for (const auto& c : region.occupied_indices()) {
    const Vec3 x = region.center(c[0], c[1], c[2]);
    if (region.interior_at_depth(x, depth)) pts.push_back(x);
  }
  if (max_samples > 0 && pts.size() > max_samples) {
    // Deterministic thinning with a stride that keeps the spatial spread.
    std::vector<Vec3> thin;
    thin.reserve(max_samples);
    const double stride = static_cast<double>(pts.size()) / static_cast<double>(max_samples);
    for (std::size_t m = 0; m < max_samples; ++m) thin.push_back(pts[static_cast<std::size_t>(m * stride)]);
    pts.swap(thin);
  }
  return pts;
}

}  // namespace

CertificationReport certify_polynomial_conservation(const VoxelRegion& region, const ElasticTensor& C,
                                                    const EigenstrainSpec& eigenstrain, const CertifyOptions& options) {
  validate_eigenstrain(eigenstrain);
  if (region.empty()) throw InputError("certification: empty region");
  const StrainCase sc = eigenstrain.strain_case;
  const Vec3 q = options.stretch ? *options.stretch : strain_case_stretch(sc, C);
  DiagonalStretch inv;
  inv.d = q.cwiseInverse();
  const VoxelRegion primed = stretch_region(region, inv);

  CertificationReport rep;
  rep.strain_case = to_string(sc);
  rep.degree = eigenstrain.density.degree;
  rep.tol_cert = options.tol_cert;
  rep.scale_free = is_scale_free(sc);
  rep.stretch = q;
  rep.points = interior_samples(region, options.depth, options.max_samples);
  const std::size_t nb = monomial_exponents(rep.degree + 1).size();
  if (rep.points.size() < 2 * nb) {
    std::ostringstream os;
    os << "certification: only " << rep.points.size() << " samples lie " << options.depth
       << " cells inside the region (need " << 2 * nb << ")";
    throw InputError(os.str());
  }
  rep.samples = rep.points.size();

  std::vector<Vec3> primed_pts;
  primed_pts.reserve(rep.points.size());
  for (const auto& x : rep.points) primed_pts.push_back(q.cwiseProduct(x));
  const PotentialQuadrature pot(primed, eigenstrain.density);
  const HessianSamples hs = hessian_field(pot, primed_pts);
  for (bool f : hs.flagged) rep.flagged_samples += f ? 1 : 0;
  rep.strain.reserve(rep.samples);
  for (const auto& H : hs.hessian) rep.strain.push_back(strain_from_hessian(sc, H, C, eigenstrain.P, q));

  double Rn = 0.0, Rn1 = 0.0, F = 0.0;
  rep.fitted.assign(rep.samples, Mat3::Zero());
  rep.degree_norms.assign(static_cast<std::size_t>(rep.degree + 1), 0.0);
  for (int c = 0; c < 6; ++c) {
    std::vector<double> vals(rep.samples);
    double sq = 0.0;
    for (std::size_t p = 0; p < rep.samples; ++p) {
      vals[p] = rep.strain[p](kComp[c][0], kComp[c][1]);
      sq += vals[p] * vals[p];
    }
    rep.component_rms[static_cast<std::size_t>(c)] = std::sqrt(sq / static_cast<double>(rep.samples));
    if (sq == 0.0) continue;  // identically zero component: nothing to fit
    const PolynomialFit fn = fit_polynomial(rep.points, vals, rep.degree);
    const PolynomialFit fn1 = fit_polynomial(rep.points, vals, rep.degree + 1);
    Rn += fn.residual_sq;
    Rn1 += fn1.residual_sq;
    F += fn.value_sq;
    for (std::size_t d = 0; d < fn.degree_norms.size(); ++d) rep.degree_norms[d] += fn.degree_norms[d];
    for (std::size_t p = 0; p < rep.samples; ++p) {
      const double v = fn.evaluate(rep.points[p]);
      rep.fitted[p](kComp[c][0], kComp[c][1]) = v;
      rep.fitted[p](kComp[c][1], kComp[c][0]) = v;
    }
  }
  rep.field_rms = std::sqrt(F / static_cast<double>(rep.samples));
  if (F > 0.0) {
    rep.residual_n = std::sqrt(Rn / F);
    rep.residual_n1 = std::sqrt(Rn1 / F);
    rep.incremental_energy = (Rn - Rn1) / F;
  }
  rep.pass = F > 0.0 && rep.residual_n <= options.tol_cert && rep.incremental_energy <= options.tol_cert;
  return rep;
}

// ---------------------------------------------------------------------------
// Non-ellipsoidality
// ---------------------------------------------------------------------------

NonEllipsoidalityReport non_ellipsoidality_score(const VoxelRegion& region, const DensityPolynomial& rho, int depth,
                                                 std::size_t max_samples) {
  validate_density(rho);
  const bool unit_quadratic = rho.form == DensityForm::quadratic && rho.coeffs == Vec3::Ones();
  if (!unit_quadratic && rho.form != DensityForm::constant)
    throw InputError("non-ellipsoidality score supports the constant density and rho = -|x|^2 only");
  NonEllipsoidalityReport rep;
  rep.pose = ellipsoid_fit(region);
  rep.symmetric_difference = symmetric_difference_fraction(region, rep.pose);

  // Interior samples of both the region and the fitted ellipsoid.
  std::vector<Vec3> pts;
  for (const auto& x : interior_samples(region, depth, 0))
    if (rep.pose.contains(x)) pts.push_back(x);
  if (pts.size() > max_samples) {
    std::vector<Vec3> thin;
    const double stride = static_cast<double>(pts.size()) / static_cast<double>(max_samples);
    for (std::size_t m = 0; m < max_samples; ++m) thin.push_back(pts[static_cast<std::size_t>(m * stride)]);
    pts.swap(thin);
  }
  rep.samples = pts.size();
  if (pts.empty()) {
    rep.potential_mismatch = 1.0;
    rep.score = std::max(rep.symmetric_difference, rep.potential_mismatch);
    return rep;
  }
  const PotentialQuadrature pot(region, rho);
  std::vector<double> numeric(pts.size()), exact(pts.size());
  NewtonianCoefficients coeffs;
  if (unit_quadratic) coeffs = quadratic_density_coefficients(rep.pose);
  parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      numeric[p] = pot.value(pts[p]);
      exact[p] = unit_quadratic ? quadratic_density_potential(rep.pose, coeffs, pts[p])
                                : constant_density_potential(rep.pose.axes, rho.c0, rep.pose.to_body(pts[p]));
    }
  });
  double sq = 0.0, lo = exact[0], hi = exact[0];
  for (std::size_t p = 0; p < pts.size(); ++p) {
    sq += (numeric[p] - exact[p]) * (numeric[p] - exact[p]);
    lo = std::min(lo, exact[p]);
    hi = std::max(hi, exact[p]);
  }
  const double rms = std::sqrt(sq / static_cast<double>(pts.size()));
  // A constant potential has no range; fall back to its magnitude.
  const double range = hi - lo > 0.0 ? hi - lo : std::max(std::abs(hi), 1e-300);
  rep.potential_mismatch = rms / range;
  rep.score = std::max(rep.symmetric_difference, rep.potential_mismatch);
  return rep;
}

}  // namespace eshelby
