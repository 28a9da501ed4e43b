// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failing criteria (0 = all pass).

#include "eshelby/config.hpp"
#include "eshelby/ellipsoid_potential.hpp"
#include "eshelby/elliptic.hpp"
#include "eshelby/fbsolver.hpp"
#include "eshelby/geometry.hpp"
#include "eshelby/greens_ti.hpp"
#include "eshelby/pipeline.hpp"
#include "eshelby/verify.hpp"
#include "eshelby/voxel_quadrature.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace eshelby;

namespace {

// Pinned tolerances.
constexpr double kIdentitySumTol = 1e-10;
constexpr double kRecurrenceTol = 1e-8;
constexpr double kIdentitySeconds = 5.0;
constexpr double kSphereJTol = 1e-12;
constexpr double kSpheroidTol = 1e-9;
constexpr double kQuadratureRelTol = 0.01;
constexpr double kQuadratureSeconds = 120.0;
constexpr double kZeroObstacleTol = 1e-12;
constexpr double kComplementarityTol = 1e-6;
constexpr double kEnergySlack = 1e-12;
constexpr double kOmega1Seconds = 600.0;
constexpr double kSelfConsistencyTol = 0.10;
constexpr double kCertTol = 0.05;
constexpr double kNonEllipsoidalityFactor = 5.0;
constexpr double kOmega2Seconds = 900.0;
constexpr double kDegenerateVTol = 1e-12;
constexpr double kQuarticResidualTol = 1e-10;
constexpr double kEquilibriumTol = 1e-3;
constexpr double kUniformityTol = 0.02;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Omega1 construction shared by criteria 6-9.
struct Omega1 {
  RunConfig cfg;
  ConstructOutcome out;
  double seconds = 0.0;
};
const Omega1& omega1() {
  static const Omega1 o = [] {
    Omega1 r;
    r.cfg = preset_config("omega1");
    const auto t0 = Clock::now();
    r.out = run_construct(r.cfg);
    r.seconds = seconds_since(t0);
    return r;
  }();
  return o;
}

Outcome criterion1() {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const auto t0 = Clock::now();
  double worst_sum = 0.0, worst_rec = 0.0;
  for (int t = 0; t < 100; ++t) {
    const EllipsoidAxes a{u(rng), u(rng), u(rng)};
    const IIntegralTable tab = compute_i_integrals(a);
    worst_sum = std::max(worst_sum, std::abs(tab.Ii.sum() - 1.0));
    worst_rec = std::max(worst_rec, recurrence_residuals(a, tab).max());
  }
  const double s = seconds_since(t0);
  return {worst_sum <= kIdentitySumTol && worst_rec <= kRecurrenceTol && s < kIdentitySeconds,
          "max|sum I_i - 1|=" + fmt("%.2e", worst_sum) + " max recurrence=" + fmt("%.2e", worst_rec) +
              " time=" + fmt("%.3fs", s)};
}

Outcome criterion2() {
  const NewtonianCoefficients c = quadratic_density_coefficients(EllipsoidPose{});
  double err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    err = std::max(err, std::abs(c.J[i] + 1.0 / 20.0));
    err = std::max(err, std::abs(c.J[i + 3] + 1.0 / 10.0));
  }
  return {err <= kSphereJTol, "max deviation=" + fmt("%.2e", err)};
}

Outcome criterion3() {
  double err = 0.0;
  for (double e : {0.3, 0.5, 0.8, 1.25, 2.0, 3.0}) {
    EllipsoidPose p;
    p.axes = EllipsoidAxes{1.0, 1.0, e};
    const NewtonianCoefficients c = quadratic_density_coefficients(p);
    err = std::max({err, std::abs(c.J[0] - c.J[1]), std::abs(c.J[0] - c.J[3] / 2.0)});
    const auto J = spheroid_quartic_coeffs(e, e < 1.0 ? SpheroidFamily::oblate : SpheroidFamily::prolate);
    err = std::max({err, std::abs(J[0] - J[1]), std::abs(J[0] - J[3] / 2.0)});
  }
  return {err <= kSpheroidTol, "max |J1-J2|, |J1-J4/2|=" + fmt("%.2e", err)};
}

Outcome criterion4() {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> ua(0.5, 1.0), ut(-0.2, 0.2), u(-1.0, 1.0);
  std::normal_distribution<double> g;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int e = 0; e < 5; ++e) {
    EllipsoidPose p;
    p.axes = EllipsoidAxes{ua(rng), ua(rng), ua(rng)};
    p.rotation = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
    p.translation = Vec3(ut(rng), ut(rng), ut(rng));
    const NewtonianCoefficients c = quadratic_density_coefficients(p);
    const Vec3 ext = Vec3::Constant(p.axes.vec().maxCoeff() * 1.05);
    const VoxelRegion r = voxelize([&](const Vec3& x) { return p.contains(x); }, p.translation - ext,
                                   p.translation + ext, Vec3::Constant(p.axes.vec().minCoeff() / 20.0));
    const VoxelIntegrator vi(r, [](const Vec3& y) { return -y.squaredNorm(); });
    for (int k = 0; k < 20;) {
      const Vec3 z(u(rng), u(rng), u(rng));
      if (z.squaredNorm() > 0.8 * 0.8) continue;
      const Vec3 x = p.to_global(z.cwiseProduct(p.axes.vec()));
      const double exact = quadratic_density_potential(p, c, x);
      worst = std::max(worst, std::abs(vi.newtonian(x) - exact) / std::abs(exact));
      ++k;
    }
  }
  const double s = seconds_since(t0);
  return {worst <= kQuadratureRelTol && s < kQuadratureSeconds,
          "max relative error=" + fmt("%.2e", worst) + " time=" + fmt("%.1fs", s)};
}

Outcome criterion5() {
  // phi = -1.
  ConstructOptions o;
  o.n = 32;
  const ConstructResult z = construct_coincidence(make_constant_obstacle(-1.0), o);
  double vmax = 0.0;
  for (double v : z.V.values) vmax = std::max(vmax, std::abs(v));
  // Quartic obstacle: complementarity and energy history on the omega1 grid.
  const Grid g = make_grid(64, 1.2);
  const ScalarField phi = sample_obstacle(g, make_quartic_obstacle(1.0 / 36.0));
  SolverOptions so;
  so.record_energy = true;
  const SolveResult r = solve_obstacle_qp(StiffnessOperator(g), phi, so);
  bool monotone = true;
  for (std::size_t i = 1; i < r.stats.energy.size(); ++i)
    if (r.stats.energy[i] > r.stats.energy[i - 1] + kEnergySlack * std::abs(r.stats.energy[i - 1])) monotone = false;
  const double comp = omega1().out.result.stats.complementarity_residual;
  const bool pass = vmax <= kZeroObstacleTol && r.stats.converged && r.stats.complementarity_residual <= kComplementarityTol &&
                    comp <= kComplementarityTol && monotone;
  return {pass, "max|V| (phi=-1)=" + fmt("%.1e", vmax) +
                    " complementarity=" + fmt("%.2e", r.stats.complementarity_residual) +
                    " (omega1 far-field " + fmt("%.2e", comp) + ") energy monotone=" + (monotone ? "yes" : "no") +
                    " over " + std::to_string(r.stats.energy.size()) + " sweeps"};
}

// Mismatched voxels between a region on a symmetric lattice and its image
// under each of the 48 signed axis permutations.
std::size_t symmetry_mismatches(const VoxelRegion& r) {
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::size_t worst = 0;
  for (const auto& p : perms)
    for (int signs = 0; signs < 8; ++signs) {
      std::size_t bad = 0;
      for (int k = 0; k < r.dims[2]; ++k)
        for (int j = 0; j < r.dims[1]; ++j)
          for (int i = 0; i < r.dims[0]; ++i) {
            const std::array<int, 3> src{i, j, k};
            std::array<int, 3> dst{};
            for (int a = 0; a < 3; ++a) {
              const int c = src[static_cast<std::size_t>(p[static_cast<std::size_t>(a)])];
              dst[static_cast<std::size_t>(a)] = (signs >> a) & 1 ? r.dims[static_cast<std::size_t>(a)] - 1 - c : c;
            }
            if (r.mask[r.index(i, j, k)] != r.mask[r.index(dst[0], dst[1], dst[2])]) ++bad;
          }
      worst = std::max(worst, bad);
    }
  return worst;
}

Outcome criterion6() {
  const Omega1& o = omega1();
  const ConstructOutcome& c = o.out;
  const std::size_t asym = symmetry_mismatches(c.coincidence);
  const bool pass = c.result.converged && !c.empty && c.coincidence_components == 1 && c.contained && asym == 0 &&
                    o.seconds <= kOmega1Seconds;
  return {pass, "voxels=" + std::to_string(c.coincidence.count()) +
                    " components=" + std::to_string(c.coincidence_components) +
                    " max|x|=" + fmt("%.4f", c.containment_radius) + " bound=" + fmt("%.4f", c.containment_bound) +
                    " symmetry mismatches=" + std::to_string(asym) + " time=" + fmt("%.1fs", o.seconds)};
}

Outcome criterion7() {
  const Omega1& o = omega1();
  const ConsistencyReport r64 = potential_consistency(o.out.contact, o.cfg.obstacle);
  RunConfig fine = o.cfg;
  fine.construct.n = 96;
  const ConstructOutcome f = run_construct(fine);
  const ConsistencyReport r96 = potential_consistency(f.contact, fine.obstacle);
  const bool pass = r64.relative_rms <= kSelfConsistencyTol && r96.rms_error < r64.rms_error;
  return {pass, "n=64 rms/range=" + fmt("%.4f", r64.relative_rms) + " rms=" + fmt("%.3e", r64.rms_error) +
                    "; n=96 rms/range=" + fmt("%.4f", r96.relative_rms) + " rms=" + fmt("%.3e", r96.rms_error)};
}

std::optional<VerifyOutcome> omega1_verify;

Outcome criterion8() {
  const Omega1& o = omega1();
  omega1_verify = run_verify(o.out.stretched, o.cfg);
  const CertificationReport& c = omega1_verify->certification;

  // Voxelized cube, uniform eigenstrain, same cubic medium and lattice spacing.
  RunConfig cube_cfg = o.cfg;
  cube_cfg.eigenstrain->density = constant_density(1.0);
  const double h = o.out.result.grid.h();
  const VoxelRegion cube = voxelize([](const Vec3& x) { return x.cwiseAbs().maxCoeff() <= 0.5; },
                                    Vec3::Constant(-0.6), Vec3::Constant(0.6), Vec3::Constant(h));
  const CertificationReport k = run_verify(cube, cube_cfg).certification;
  const bool pass = c.pass && c.degree == 2 && c.incremental_energy <= kCertTol && c.residual_n <= kCertTol &&
                    k.degree == 0 && !k.pass;
  return {pass, "omega1 degree " + std::to_string(c.degree) + " residual=" + fmt("%.4f", c.residual_n) +
                    " incremental=" + fmt("%.4f", c.incremental_energy) + " (" + (c.pass ? "PASS" : "FAIL") +
                    "); cube degree 0 residual=" + fmt("%.4f", k.residual_n) + " (" + (k.pass ? "PASS" : "FAIL") + ")"};
}

Outcome criterion9() {
  const Omega1& o = omega1();
  if (!omega1_verify) omega1_verify = run_verify(o.out.stretched, o.cfg);
  const NonEllipsoidalityReport& s = omega1_verify->non_ellipsoidality;
  // Floor: the fitted ellipsoid itself, voxelized at the same spacing.
  const EllipsoidPose& e = s.pose;
  const Vec3 ext = Vec3::Constant(e.axes.vec().maxCoeff() * 1.1);
  const VoxelRegion ell = voxelize([&](const Vec3& x) { return e.contains(x); }, e.translation - ext,
                                   e.translation + ext, o.out.contact.spacing);
  const NonEllipsoidalityReport floor = non_ellipsoidality_score(ell, o.cfg.eigenstrain->density);
  const bool pass = s.score > kNonEllipsoidalityFactor * floor.score;
  return {pass, "omega1 score=" + fmt("%.4f", s.score) + " floor=" + fmt("%.4f", floor.score) +
                    " ratio=" + fmt("%.1f", s.score / floor.score)};
}

Outcome criterion10() {
  const RunConfig cfg = preset_config("omega2");
  const auto t0 = Clock::now();
  const ConstructOutcome o = run_construct(cfg);
  const ConsistencyReport r = potential_consistency(o.contact, cfg.obstacle);
  const double s = seconds_since(t0);
  const bool pass = o.result.converged && !o.empty && o.coincidence_components == 1 &&
                    r.relative_rms <= kSelfConsistencyTol && s <= kOmega2Seconds;
  return {pass, "voxels=" + std::to_string(o.coincidence.count()) +
                    " components=" + std::to_string(o.coincidence_components) +
                    " rms/range=" + fmt("%.4f", r.relative_rms) + " time=" + fmt("%.1fs", s)};
}

// max_im |C_ijkl G_km,jl| / max term at |x| = 1, by nested central differences.
double equilibrium_residual(const ElasticTensor& C, const Vec3& x) {
  const TIGreenConstants k = ti_constants(C);
  const double h = 1e-3;
  Mat3 res = Mat3::Zero();
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
            const double t = C.cijkl(i, j, kk, l) * d2(kk, m);
            res(i, m) += t;
            scale = std::max(scale, std::abs(t));
          }
    }
  return res.cwiseAbs().maxCoeff() / scale;
}

Outcome criterion11() {
  const ElasticTensor deg = *preset_config("ti_degenerate").material;
  const TIGreenConstants kd = ti_constants(deg);
  const double v_err = std::abs(kd.v - std::pow(deg.C(1, 1) / deg.C(3, 3), 0.25));
  const ElasticTensor nd = make_transversely_isotropic(10, 3, 2, 8, 2.5);
  const TIGreenConstants kn = ti_constants(nd);
  const double quartic = std::max(ti_quartic_residual(nd, kn.v1), ti_quartic_residual(nd, kn.v2));
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  double eq = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Vec3 x = Vec3(g(rng), g(rng), g(rng)).normalized();
    eq = std::max({eq, equilibrium_residual(deg, x), equilibrium_residual(nd, x)});
  }
  const bool pass = kd.degenerate && !kn.degenerate && v_err <= kDegenerateVTol && quartic <= kQuarticResidualTol &&
                    eq <= kEquilibriumTol;
  return {pass, "|v-(C11/C33)^1/4|=" + fmt("%.1e", v_err) + " quartic residual=" + fmt("%.1e", quartic) +
                    " equilibrium residual=" + fmt("%.2e", eq)};
}

Outcome criterion12() {
  double worst = 0.0;
  std::string detail;
  for (const ElasticTensor& C :
       {make_transversely_isotropic(10, 3, 2, 8, 2.5), make_transversely_isotropic(16, 6, 2, 1, 1)}) {
    const double gamma = scale_factors(C).gamma;
    const double h = 1.0 / 32.0;
    const Vec3 a(0.5, 0.5, 0.35);
    const VoxelRegion sp = voxelize([&](const Vec3& x) { return x.cwiseQuotient(a).squaredNorm() <= 1.0; },
                                    -1.1 * a, 1.1 * a, Vec3::Constant(h));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> centres;
    while (centres.size() < 10) {
      const Vec3 x(u(rng) * a[0], u(rng) * a[1], u(rng) * a[2]);
      if (sp.interior_at_depth(x, 4)) centres.push_back(x);
    }
    const double s = 2.0 * h;
    std::vector<Vec3> q;
    for (const Vec3& x : centres)
      for (int d = 0; d < 3; ++d) {
        q.push_back(x + s * Vec3::Unit(d));
        q.push_back(x - s * Vec3::Unit(d));
      }
    const auto disp = displacement_uniform_eigenstrain(sp, C, Vec3(1.0, 1.0, gamma).asDiagonal(), q);
    std::vector<Mat3> eps;
    Mat3 mean = Mat3::Zero();
    for (std::size_t p = 0; p < centres.size(); ++p) {
      Mat3 G;
      for (int d = 0; d < 3; ++d)
        G.col(d) = (disp[6 * p + 2 * static_cast<std::size_t>(d)] - disp[6 * p + 2 * static_cast<std::size_t>(d) + 1]) /
                   (2.0 * s);
      eps.push_back(0.5 * (G + G.transpose()));
      mean += eps.back() / static_cast<double>(centres.size());
    }
    double var = 0.0;
    for (const Mat3& e : eps) var = std::max(var, (e - mean).norm() / mean.norm());
    worst = std::max(worst, var);
    detail += std::string(detail.empty() ? "" : ", ") + (ti_constants(C).degenerate ? "degenerate" : "non-degenerate") +
              " variation=" + fmt("%.4f", var);
  }
  return {worst <= kUniformityTol, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3},  {4, criterion4},   {5, criterion5},   {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11}, {12, criterion12}};
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
