#include "eshelby/greens_ti.hpp"

#include "eshelby/voxel_quadrature.hpp"

#include <cmath>

namespace eshelby {

TIGreenConstants ti_constants(const ElasticTensor& C) {
  if (C.symmetry_class != SymmetryClass::transversely_isotropic)
    throw DomainError("TI Green function requires a transversely isotropic tensor");
  const ConstraintReport cr = check_construction_constraints(C);
  if (cr.ti_c13_plus_c44_zero) throw DomainError("TI Green constants require C13 + C44 != 0");
  if (cr.ti_branch == TIBranch::complex_roots)
    throw DomainError("sqrt(C11 C33) - C13 - 2 C44 < 0: complex v_i regime is not supported");

  TIGreenConstants k;
  k.C11 = C.C(1, 1);
  k.C12 = C.C(1, 2);
  k.C13 = C.C(1, 3);
  k.C33 = C.C(3, 3);
  k.C44 = C.C(4, 4);
  k.v3 = std::sqrt((k.C11 - k.C12) / (2.0 * k.C44));
  const double s = std::sqrt(k.C11 * k.C33);
  const double den = 4.0 * k.C33 * k.C44;
  if (cr.ti_branch == TIBranch::degenerate) {
    k.degenerate = true;
    k.v = std::pow(k.C11 / k.C33, 0.25);
    k.v1 = k.v2 = k.v;
    return k;
  }
  const double P = (s - k.C13) * (s + k.C13 + 2.0 * k.C44) / den;
  const double M = (s + k.C13) * (s - k.C13 - 2.0 * k.C44) / den;
  k.v1 = std::sqrt(P) + std::sqrt(std::max(0.0, M));
  k.v2 = std::sqrt(P) - std::sqrt(std::max(0.0, M));
  k.v = k.v1;
  const double vv[2] = {k.v1, k.v2};
  const double dv2 = k.v2 * k.v2 - k.v1 * k.v1;
  for (int i = 0; i < 2; ++i) {
    const double vi = vv[i];
    // (-1)^(i+1) with i = 1, 2. H_i carries the same sign as A_i: only then do
    // the |x3| terms of the in-plane block cancel (sum 2 v_i^2 H_i = 1/(4 pi C44)).
    const double sign_a = (i == 0) ? 1.0 : -1.0;
    const double sign_h = sign_a;
    k.A[i] = sign_a * (k.C13 + k.C44) / (4.0 * pi * k.C33 * k.C44 * dv2 * vi);
    k.k[i] = (k.C11 / (vi * vi) - k.C44) / (k.C13 + k.C44);
    k.H[i] = sign_h * (k.C44 - k.C33 * vi * vi) / (8.0 * pi * k.C33 * k.C44 * dv2 * vi * vi);
  }
  return k;
}

namespace {

Mat3 green_nondegenerate(const TIGreenConstants& k, const Vec3& x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  const double rho2 = x1 * x1 + x2 * x2;
  const double rho4 = rho2 * rho2;
  const double vv[2] = {k.v1, k.v2};
  double g11 = 0, g12 = 0, g22 = 0, g13 = 0, g23 = 0, g33 = 0;
  for (int i = 0; i < 2; ++i) {
    const double vi = vv[i], vi2 = vi * vi;
    const double Ri2 = rho2 + vi2 * x3 * x3;
    const double Ri = std::sqrt(Ri2);
    const double c = 2.0 * vi * k.H[i];
    g11 += c * (x2 * x2 * Ri2 - vi2 * x1 * x1 * x3 * x3) / (rho4 * Ri);
    g22 += c * (x1 * x1 * Ri2 - vi2 * x2 * x2 * x3 * x3) / (rho4 * Ri);
    g12 += -c * x1 * x2 * (rho2 + 2.0 * vi2 * x3 * x3) / (rho4 * Ri);
    g13 += -vi * k.A[i] * vi * x1 * x3 / (rho2 * Ri);
    g23 += -vi * k.A[i] * vi * x2 * x3 / (rho2 * Ri);
    g33 += vi2 * k.k[i] * k.A[i] / Ri;
  }
  const double v3 = k.v3, v32 = v3 * v3;
  const double R32 = rho2 + v32 * x3 * x3;
  const double R3 = std::sqrt(R32);
  const double c3 = 1.0 / (4.0 * pi * k.C44 * v3);
  g11 += c3 * (x1 * x1 * R32 - v32 * x2 * x2 * x3 * x3) / (rho4 * R3);
  g22 += c3 * (x2 * x2 * R32 - v32 * x1 * x1 * x3 * x3) / (rho4 * R3);
  g12 += c3 * x1 * x2 * (rho2 + 2.0 * v32 * x3 * x3) / (rho4 * R3);
  Mat3 G;
  G << g11, g12, g13, g12, g22, g23, g13, g23, g33;
  return G;
}

Mat3 green_degenerate(const TIGreenConstants& k, const Vec3& x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], ax3 = std::abs(x3);
  const double rho2 = x1 * x1 + x2 * x2;
  const double v = k.v, v2 = v * v, v3 = k.v3;
  const double R3 = std::sqrt(rho2 + v3 * v3 * x3 * x3);
  const double R0 = std::sqrt(rho2 + v2 * x3 * x3);
  const double R03 = R0 * R0 * R0;
  const double S3 = R3 + v3 * ax3;
  const double S0 = R0 + v * ax3;
  const double U = -1.0 / (8.0 * pi * k.C33 * v2 * v * R03) +
                   (2.0 * v2 * x3 * x3 * S0 * S0 - rho2 * rho2) / (8.0 * pi * k.C44 * v * R03 * S0 * S0 * S0 * S0);
  const double c3 = 1.0 / (4.0 * pi * k.C44 * v3 * S3 * S3 * R3);
  const double common = 1.0 / (8.0 * pi * v * R0) * (1.0 / (k.C33 * v2) + rho2 / (k.C44 * S0 * S0));
  const double g11 = c3 * (S3 * R3 - x2 * x2) + common + U * x1 * x1;
  const double g22 = c3 * (S3 * R3 - x1 * x1) + common + U * x2 * x2;
  const double g12 = c3 * x1 * x2 + U * x1 * x2;
  const double d = 8.0 * pi * k.C33 * k.C44 * v * R03;
  const double g13 = (k.C13 + k.C44) * x1 * x3 / d;
  const double g23 = (k.C13 + k.C44) * x2 * x3 / d;
  const double g33 = ((v2 * k.C33 + k.C44) * rho2 + 2.0 * k.C33 * v2 * v2 * x3 * x3) / d;
  Mat3 G;
  G << g11, g12, g13, g12, g22, g23, g13, g23, g33;
  return G;
}

}  // namespace

Mat3 green_ti(const TIGreenConstants& k, const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw SingularityError("Green function evaluated at the origin");
  if (k.degenerate) return green_degenerate(k, x);
  const double rho = std::hypot(x[0], x[1]);
  if (rho > 1e-6 * r) return green_nondegenerate(k, x);
  const double d = 1e-3 * r;
  Mat3 G = Mat3::Zero();
  G += green_nondegenerate(k, x + Vec3(d, 0, 0));
  G += green_nondegenerate(k, x - Vec3(d, 0, 0));
  G += green_nondegenerate(k, x + Vec3(0, d, 0));
  G += green_nondegenerate(k, x - Vec3(0, d, 0));
  return 0.25 * G;
}

Mat3 green_ti(const ElasticTensor& C, const Vec3& x) { return green_ti(ti_constants(C), x); }

AxisymmetricEigenstress axisymmetric_eigenstress(const Mat3& sigma) {
  const double scale = std::max(1e-300, sigma.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && std::abs(sigma(i, j)) > 1e-12 * scale)
        throw InputError("unsupported eigenstress: off-diagonal entries must vanish");
  if (std::abs(sigma(0, 0) - sigma(1, 1)) > 1e-12 * scale)
    throw InputError("unsupported eigenstress: sigma11 must equal sigma22");
  return {sigma(0, 0), sigma(2, 2)};
}

// Signs follow u_i(x) = -int_Omega G_ij,k(x - y) sigma*_jk dy with the H_i
// convention above; the v_2 term vanishes exactly at s33 / s11 = gamma.
std::array<Vec3, 2> ti_k_tensors(const TIGreenConstants& k, const AxisymmetricEigenstress& s) {
  if (!k.degenerate) {
    std::array<Vec3, 2> out;
    const double vv[2] = {k.v1, k.v2};
    for (int i = 0; i < 2; ++i) {
      const double vi = vv[i];
      const double a = vi * (2.0 * k.H[i] * s.s11 + k.A[i] * vi * s.s33);
      const double b = -k.A[i] * (s.s11 - k.k[i] * vi * vi * s.s33);
      out[i] = Vec3(a, a, b);
    }
    return out;
  }
  const double v = k.v, v2 = v * v;
  const double c = 8.0 * pi * k.C33 * k.C44;
  const double beta1 = -((k.C33 * v2 + k.C44) * s.s11 - (k.C13 + k.C44) * v2 * s.s33) / (c * v2 * v);
  const double beta1p = ((k.C13 + k.C44) * s.s11 - (k.C33 * v2 + k.C44) * v2 * s.s33) / (c * v2 * v);
  const double beta2 = ((k.C33 * v2 - k.C44) * s.s11 - (k.C13 + k.C44) * v2 * s.s33) / (c * v);
  const double beta2p = ((k.C13 + k.C44) * s.s11 - (k.C33 * v2 - k.C44) * v2 * s.s33) / (c * v);
  return {Vec3(beta1, beta1, beta1p), Vec3(beta2, beta2, beta2p)};
}

std::vector<TIPotentialTerm> ti_displacement_terms(const TIGreenConstants& k, const AxisymmetricEigenstress& s) {
  const auto K = ti_k_tensors(k, s);
  if (!k.degenerate)
    return {TIPotentialTerm{-K[0], k.v1 * k.v1, 0}, TIPotentialTerm{-K[1], k.v2 * k.v2, 0}};
  return {TIPotentialTerm{K[0], k.v * k.v, 0}, TIPotentialTerm{K[1], k.v * k.v, 1}};
}

Vec3 ti_displacement_integrand(const std::vector<TIPotentialTerm>& terms, const Vec3& d) {
  Vec3 u = Vec3::Zero();
  for (const auto& t : terms) {
    const double m = t.m3;
    const double R2 = d[0] * d[0] + d[1] * d[1] + m * d[2] * d[2];
    const double R = std::sqrt(R2);
    const double R3 = R2 * R;
    Vec3 g;
    if (t.kernel == 0) {
      g = -Vec3(d[0], d[1], m * d[2]) / R3;
    } else {
      const double R5 = R3 * R2;
      const double z2 = d[2] * d[2];
      g = Vec3(-3.0 * z2 * d[0] / R5, -3.0 * z2 * d[1] / R5, 2.0 * d[2] / R3 - 3.0 * m * z2 * d[2] / R5);
    }
    u += t.K.cwiseProduct(g);
  }
  return u;
}

std::vector<Vec3> displacement_uniform_eigenstrain(const VoxelRegion& region, const ElasticTensor& C,
                                                   const Mat3& sigma_star, const std::vector<Vec3>& points) {
  const AxisymmetricEigenstress s = axisymmetric_eigenstress(sigma_star);
  const TIGreenConstants k = ti_constants(C);
  const auto terms = ti_displacement_terms(k, s);
  const auto one = [](const Vec3&) { return 1.0; };

  // Each term needs grad W_t; the d3^2/R^3 kernel is -2 dW/dm of the 1/R_m
  // potential, taken by a central difference in m.
  struct Evaluator {
    std::vector<VoxelIntegrator> integ;
    double dm = 0.0;
  };
  std::vector<Evaluator> ev;
  for (const auto& t : terms) {
    Evaluator e;
    if (t.kernel == 0) {
      e.integ.emplace_back(region, one, t.m3);
    } else {
      e.dm = 1e-4 * t.m3;
      e.integ.emplace_back(region, one, t.m3 + e.dm);
      e.integ.emplace_back(region, one, t.m3 - e.dm);
    }
    ev.push_back(std::move(e));
  }
  std::vector<Vec3> out(points.size(), Vec3::Zero());
  parallel_for(
      points.size(),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
          Vec3 u = Vec3::Zero();
          for (std::size_t t = 0; t < terms.size(); ++t) {
            Vec3 g;
            if (terms[t].kernel == 0) {
              g = ev[t].integ[0].integral_gradient(points[p]);
            } else {
              g = -2.0 * (ev[t].integ[0].integral_gradient(points[p]) - ev[t].integ[1].integral_gradient(points[p])) /
                  (2.0 * ev[t].dm);
            }
            u += terms[t].K.cwiseProduct(g);
          }
          out[p] = u;
        }
      },
      1);
  return out;
}

std::vector<Vec3> displacement_single_potential(const VoxelRegion& region, const ElasticTensor& C, double s11,
                                                const std::vector<Vec3>& points) {
  const ScaleFactors f = scale_factors(C);
  if (f.kind != ScaleKind::transiso_v) throw DomainError("single-potential form needs the TI case C13 + C44 != 0");
  const double C11 = C.C(1, 1), C13 = C.C(1, 3), C44 = C.C(4, 4);
  const double v = f.v;
  const Vec3 Kstar(s11 / C11, s11 / C11, (C11 - C44 * v * v) * s11 / (v * v * (C13 + C44) * C11));
  const VoxelIntegrator integ(region, [](const Vec3&) { return 1.0; }, v * v);
  std::vector<Vec3> out(points.size());
  parallel_for(
      points.size(),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p)
          out[p] = -Kstar.cwiseProduct(integ.integral_gradient(points[p])) * (v / (4.0 * pi));
      },
      1);
  return out;
}

}  // namespace eshelby
