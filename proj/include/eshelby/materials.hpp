#pragma once

#include "eshelby/common.hpp"

#include <array>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace eshelby {

// Voigt index convention: 1=11, 2=22, 3=33, 4=23, 5=13, 6=12.
enum class SymmetryClass { isotropic, cubic, transversely_isotropic, orthotropic, monoclinic };

std::string to_string(SymmetryClass c);
SymmetryClass symmetry_class_from_string(const std::string& s);

struct ElasticTensor {
  Mat6 voigt = Mat6::Zero();
  SymmetryClass symmetry_class = SymmetryClass::isotropic;

  // 1-based Voigt entry accessor, C(1,1) == C11.
  double C(int i, int j) const { return voigt(i - 1, j - 1); }
  // Largest absolute entry; the normalisation used for "== 0" checks.
  double max_entry() const { return voigt.cwiseAbs().maxCoeff(); }
  // Fourth-order tensor entry C_ijkl, 0-based indices.
  double cijkl(int i, int j, int k, int l) const;
};

// Builders fill dependent entries from the symmetry pattern. They do not
// check positive-definiteness (see validate_elastic_tensor).
ElasticTensor make_isotropic(double lambda, double mu);
ElasticTensor make_cubic(double C11, double C12, double C44);
ElasticTensor make_transversely_isotropic(double C11, double C12, double C13, double C33, double C44);
ElasticTensor make_orthotropic(double C11, double C12, double C13, double C22, double C23, double C33,
                               double C44, double C55, double C66);
// Monoclinic with x3 as the two-fold axis: orthotropic entries plus C16, C26, C36, C45.
ElasticTensor make_monoclinic(double C11, double C12, double C13, double C22, double C23, double C33,
                              double C44, double C55, double C66, double C16, double C26, double C36,
                              double C45);

// Wraps a full Voigt matrix after checking symmetry (1e-12 relative) and the
// sparsity/equality pattern of the declared class. Throws StructuralError.
ElasticTensor elastic_tensor_from_voigt(const Mat6& voigt, SymmetryClass cls);

// Builds a tensor from named independent entries ("C11", "C44", ... or
// "lambda"/"mu" for isotropic). Missing required keys raise InputError.
ElasticTensor elastic_tensor_from_entries(SymmetryClass cls, const std::map<std::string, double>& entries);
// Independent entries of the class, by name, as used in serialisation.
std::map<std::string, double> independent_entries(const ElasticTensor& C);

struct NamedCheck {
  std::string name;
  double value = 0.0;  // quantity whose sign/zero-ness is tested
  bool holds = false;
};

struct ValidityReport {
  bool pass = false;
  std::vector<NamedCheck> checks;
  std::vector<std::string> violated;
};

// Per-class strict positive-definiteness inequalities. Throws StructuralError
// when the matrix is asymmetric or violates the class pattern.
ValidityReport validate_elastic_tensor(const ElasticTensor& C);

enum class TIBranch { not_applicable, nondegenerate, degenerate, complex_roots };
std::string to_string(TIBranch b);

struct ConstraintReport {
  SymmetryClass symmetry_class = SymmetryClass::isotropic;
  bool satisfied = false;  // the construction scenario of this class applies
  std::vector<NamedCheck> checks;
  // Transversely isotropic only.
  bool ti_c13_plus_c44_zero = false;
  TIBranch ti_branch = TIBranch::not_applicable;
  double ti_degeneracy = 0.0;  // (sqrt(C11 C33) - C13 - 2 C44) / max entry
};

// Absolute tolerance applied to max-entry-normalised stiffness for "== 0".
inline constexpr double kConstraintTol = 1e-10;

ConstraintReport check_construction_constraints(const ElasticTensor& C);

enum class ScaleKind { cubic_t, transiso_v, transiso_s, ortho_s1s2, isotropic_none };
std::string to_string(ScaleKind k);

struct ScaleFactors {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();
  ScaleKind kind = ScaleKind::isotropic_none;
  double t = unset;
  double s1 = unset;
  double s2 = unset;
  double v = unset;
  double gamma = unset;
  // Both roots of the quartic in v (transiso_v only), v1 >= v2.
  double v1 = unset;
  double v2 = unset;
  double quartic_residual = unset;  // max relative residual of the populated roots
  bool degenerate = false;
};

// Quartic C33 C44 v^4 - (C11 C33 + C44^2 - (C13+C44)^2) v^2 + C11 C44 = 0,
// evaluated relative to C11*C44.
double ti_quartic_residual(const ElasticTensor& C, double v);

ScaleFactors scale_factors(const ElasticTensor& C);

// Diagonal of the stretch matrix mapping physical coordinates x to the
// primed frame x' = diag(q) x in which the Newtonian potential is isotropic
// (Q-tilde for cubic / TI, Q-hat for orthotropic and monoclinic). Isotropic
// media return (1,1,1).
Vec3 stretch_diagonal(const ElasticTensor& C);

}  // namespace eshelby
