#include "eshelby/materials.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace eshelby {

namespace {

int voigt_index(int i, int j) {
  if (i == j) return i;
  if ((i == 1 && j == 2) || (i == 2 && j == 1)) return 3;
  if ((i == 0 && j == 2) || (i == 2 && j == 0)) return 4;
  return 5;
}

void set_sym(Mat6& m, int i, int j, double v) {
  m(i - 1, j - 1) = v;
  m(j - 1, i - 1) = v;
}

// Entries (1-based, upper triangle) that may be nonzero for each class.
bool in_pattern(SymmetryClass cls, int i, int j) {
  if (i > j) std::swap(i, j);
  const bool ortho = (i <= 3 && j <= 3) || (i == j);
  if (cls != SymmetryClass::monoclinic) return ortho;
  return ortho || (i == 1 && j == 6) || (i == 2 && j == 6) || (i == 3 && j == 6) || (i == 4 && j == 5);
}

NamedCheck check_positive(const std::string& name, double value) {
  return NamedCheck{name, value, value > 0.0};
}

NamedCheck check_zero(const std::string& name, double value, double scale) {
  const double normalized = scale > 0 ? value / scale : value;
  return NamedCheck{name, normalized, std::abs(normalized) <= kConstraintTol};
}

NamedCheck check_nonzero(const std::string& name, double value, double scale) {
  const double normalized = scale > 0 ? value / scale : value;
  return NamedCheck{name, normalized, std::abs(normalized) > kConstraintTol};
}

double require(const std::map<std::string, double>& e, const std::string& key) {
  auto it = e.find(key);
  if (it == e.end()) throw InputError("elastic tensor: missing entry '" + key + "'");
  if (!std::isfinite(it->second)) throw InputError("elastic tensor: entry '" + key + "' is not finite");
  return it->second;
}

double optional(const std::map<std::string, double>& e, const std::string& key) {
  auto it = e.find(key);
  return it == e.end() ? 0.0 : it->second;
}

void check_pattern(const ElasticTensor& C) {
  const double scale = std::max(C.max_entry(), 1e-300);
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      if (std::abs(C.voigt(i, j) - C.voigt(j, i)) > 1e-12 * scale) {
        std::ostringstream os;
        os << "Voigt matrix is not symmetric at (" << i + 1 << "," << j + 1 << ")";
        throw StructuralError(os.str());
      }
    }
  }
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) {
      if (!in_pattern(C.symmetry_class, i, j) && C.C(i, j) != 0.0) {
        std::ostringstream os;
        os << "entry C" << i << j << " must be zero for class " << to_string(C.symmetry_class);
        throw StructuralError(os.str());
      }
    }
  }
  auto eq = [&](double a, double b, const char* what) {
    if (std::abs(a - b) > 1e-12 * scale) {
      throw StructuralError(std::string("symmetry pattern violated: ") + what + " for class " +
                            to_string(C.symmetry_class));
    }
  };
  switch (C.symmetry_class) {
    case SymmetryClass::isotropic:
      eq(C.C(1, 1), C.C(2, 2), "C11 == C22");
      eq(C.C(1, 1), C.C(3, 3), "C11 == C33");
      eq(C.C(1, 2), C.C(1, 3), "C12 == C13");
      eq(C.C(1, 2), C.C(2, 3), "C12 == C23");
      eq(C.C(4, 4), C.C(5, 5), "C44 == C55");
      eq(C.C(4, 4), C.C(6, 6), "C44 == C66");
      eq(C.C(4, 4), 0.5 * (C.C(1, 1) - C.C(1, 2)), "C44 == (C11-C12)/2");
      break;
    case SymmetryClass::cubic:
      eq(C.C(1, 1), C.C(2, 2), "C11 == C22");
      eq(C.C(1, 1), C.C(3, 3), "C11 == C33");
      eq(C.C(1, 2), C.C(1, 3), "C12 == C13");
      eq(C.C(1, 2), C.C(2, 3), "C12 == C23");
      eq(C.C(4, 4), C.C(5, 5), "C44 == C55");
      eq(C.C(4, 4), C.C(6, 6), "C44 == C66");
      break;
    case SymmetryClass::transversely_isotropic:
      eq(C.C(1, 1), C.C(2, 2), "C11 == C22");
      eq(C.C(1, 3), C.C(2, 3), "C13 == C23");
      eq(C.C(4, 4), C.C(5, 5), "C44 == C55");
      eq(C.C(6, 6), 0.5 * (C.C(1, 1) - C.C(1, 2)), "C66 == (C11-C12)/2");
      break;
    case SymmetryClass::orthotropic:
    case SymmetryClass::monoclinic:
      break;
  }
}

}  // namespace

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::isotropic: return "isotropic";
    case SymmetryClass::cubic: return "cubic";
    case SymmetryClass::transversely_isotropic: return "transversely_isotropic";
    case SymmetryClass::orthotropic: return "orthotropic";
    case SymmetryClass::monoclinic: return "monoclinic";
  }
  return "unknown";
}

SymmetryClass symmetry_class_from_string(const std::string& s) {
  if (s == "isotropic") return SymmetryClass::isotropic;
  if (s == "cubic") return SymmetryClass::cubic;
  if (s == "transversely_isotropic" || s == "ti" || s == "transiso") return SymmetryClass::transversely_isotropic;
  if (s == "orthotropic") return SymmetryClass::orthotropic;
  if (s == "monoclinic") return SymmetryClass::monoclinic;
  throw InputError("unknown symmetry_class '" + s + "'");
}

double ElasticTensor::cijkl(int i, int j, int k, int l) const {
  return voigt(voigt_index(i, j), voigt_index(k, l));
}

ElasticTensor make_isotropic(double lambda, double mu) {
  ElasticTensor C;
  C.symmetry_class = SymmetryClass::isotropic;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) set_sym(C.voigt, i, j, lambda);
    set_sym(C.voigt, i, i, lambda + 2.0 * mu);
    set_sym(C.voigt, i + 3, i + 3, mu);
  }
  return C;
}

ElasticTensor make_cubic(double C11, double C12, double C44) {
  ElasticTensor C;
  C.symmetry_class = SymmetryClass::cubic;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) set_sym(C.voigt, i, j, C12);
    set_sym(C.voigt, i, i, C11);
    set_sym(C.voigt, i + 3, i + 3, C44);
  }
  return C;
}

ElasticTensor make_transversely_isotropic(double C11, double C12, double C13, double C33, double C44) {
  ElasticTensor C;
  C.symmetry_class = SymmetryClass::transversely_isotropic;
  set_sym(C.voigt, 1, 1, C11);
  set_sym(C.voigt, 2, 2, C11);
  set_sym(C.voigt, 3, 3, C33);
  set_sym(C.voigt, 1, 2, C12);
  set_sym(C.voigt, 1, 3, C13);
  set_sym(C.voigt, 2, 3, C13);
  set_sym(C.voigt, 4, 4, C44);
  set_sym(C.voigt, 5, 5, C44);
  set_sym(C.voigt, 6, 6, 0.5 * (C11 - C12));
  return C;
}

ElasticTensor make_orthotropic(double C11, double C12, double C13, double C22, double C23, double C33,
                               double C44, double C55, double C66) {
  ElasticTensor C;
  C.symmetry_class = SymmetryClass::orthotropic;
  set_sym(C.voigt, 1, 1, C11);
  set_sym(C.voigt, 1, 2, C12);
  set_sym(C.voigt, 1, 3, C13);
  set_sym(C.voigt, 2, 2, C22);
  set_sym(C.voigt, 2, 3, C23);
  set_sym(C.voigt, 3, 3, C33);
  set_sym(C.voigt, 4, 4, C44);
  set_sym(C.voigt, 5, 5, C55);
  set_sym(C.voigt, 6, 6, C66);
  return C;
}

ElasticTensor make_monoclinic(double C11, double C12, double C13, double C22, double C23, double C33,
                              double C44, double C55, double C66, double C16, double C26, double C36,
                              double C45) {
  ElasticTensor C = make_orthotropic(C11, C12, C13, C22, C23, C33, C44, C55, C66);
  C.symmetry_class = SymmetryClass::monoclinic;
  set_sym(C.voigt, 1, 6, C16);
  set_sym(C.voigt, 2, 6, C26);
  set_sym(C.voigt, 3, 6, C36);
  set_sym(C.voigt, 4, 5, C45);
  return C;
}

ElasticTensor elastic_tensor_from_voigt(const Mat6& voigt, SymmetryClass cls) {
  if (!voigt.allFinite()) throw StructuralError("Voigt matrix has non-finite entries");
  ElasticTensor C;
  C.voigt = voigt;
  C.symmetry_class = cls;
  check_pattern(C);
  return C;
}

ElasticTensor elastic_tensor_from_entries(SymmetryClass cls, const std::map<std::string, double>& e) {
  switch (cls) {
    case SymmetryClass::isotropic:
      if (e.count("lambda") || e.count("mu")) return make_isotropic(require(e, "lambda"), require(e, "mu"));
      {
        const double C11 = require(e, "C11");
        const double C12 = require(e, "C12");
        return make_isotropic(C12, 0.5 * (C11 - C12));
      }
    case SymmetryClass::cubic:
      return make_cubic(require(e, "C11"), require(e, "C12"), require(e, "C44"));
    case SymmetryClass::transversely_isotropic:
      return make_transversely_isotropic(require(e, "C11"), require(e, "C12"), require(e, "C13"),
                                         require(e, "C33"), require(e, "C44"));
    case SymmetryClass::orthotropic:
      return make_orthotropic(require(e, "C11"), require(e, "C12"), require(e, "C13"), require(e, "C22"),
                              require(e, "C23"), require(e, "C33"), require(e, "C44"), require(e, "C55"),
                              require(e, "C66"));
    case SymmetryClass::monoclinic:
      return make_monoclinic(require(e, "C11"), require(e, "C12"), require(e, "C13"), require(e, "C22"),
                             require(e, "C23"), require(e, "C33"), require(e, "C44"), require(e, "C55"),
                             require(e, "C66"), require(e, "C16"), optional(e, "C26"), optional(e, "C36"),
                             optional(e, "C45"));
  }
  throw InputError("unsupported symmetry class");
}

std::map<std::string, double> independent_entries(const ElasticTensor& C) {
  std::map<std::string, double> out;
  auto put = [&](int i, int j) {
    out["C" + std::to_string(i) + std::to_string(j)] = C.C(i, j);
  };
  switch (C.symmetry_class) {
    case SymmetryClass::isotropic:
      out["lambda"] = C.C(1, 2);
      out["mu"] = C.C(4, 4);
      break;
    case SymmetryClass::cubic:
      put(1, 1), put(1, 2), put(4, 4);
      break;
    case SymmetryClass::transversely_isotropic:
      put(1, 1), put(1, 2), put(1, 3), put(3, 3), put(4, 4);
      break;
    case SymmetryClass::monoclinic:
      put(1, 6), put(2, 6), put(3, 6), put(4, 5);
      [[fallthrough]];
    case SymmetryClass::orthotropic:
      put(1, 1), put(1, 2), put(1, 3), put(2, 2), put(2, 3), put(3, 3), put(4, 4), put(5, 5), put(6, 6);
      break;
  }
  return out;
}

ValidityReport validate_elastic_tensor(const ElasticTensor& C) {
  if (!C.voigt.allFinite()) throw StructuralError("Voigt matrix has non-finite entries");
  check_pattern(C);
  ValidityReport r;
  auto& ch = r.checks;
  const double C11 = C.C(1, 1), C12 = C.C(1, 2), C13 = C.C(1, 3), C22 = C.C(2, 2), C23 = C.C(2, 3),
               C33 = C.C(3, 3), C44 = C.C(4, 4), C55 = C.C(5, 5), C66 = C.C(6, 6);
  switch (C.symmetry_class) {
    case SymmetryClass::isotropic: {
      const double mu = C44, lambda = C12;
      ch.push_back(check_positive("mu>0", mu));
      ch.push_back(check_positive("3*lambda+2*mu>0", 3.0 * lambda + 2.0 * mu));
      break;
    }
    case SymmetryClass::cubic:
      ch.push_back(check_positive("C11>0", C11));
      ch.push_back(check_positive("C44>0", C44));
      ch.push_back(check_positive("C11>C12", C11 - C12));
      ch.push_back(check_positive("C11+2*C12>0", C11 + 2.0 * C12));
      break;
    case SymmetryClass::transversely_isotropic:
      ch.push_back(check_positive("C44>0", C44));
      ch.push_back(check_positive("C11-C12>0", C11 - C12));
      ch.push_back(check_positive("C11+C12+C33>0", C11 + C12 + C33));
      ch.push_back(check_positive("(C11+C12)*C33>2*C13^2", (C11 + C12) * C33 - 2.0 * C13 * C13));
      break;
    case SymmetryClass::orthotropic:
    case SymmetryClass::monoclinic: {
      ch.push_back(check_positive("C11>0", C11));
      ch.push_back(check_positive("C22>0", C22));
      ch.push_back(check_positive("C33>0", C33));
      ch.push_back(check_positive("C44>0", C44));
      ch.push_back(check_positive("C55>0", C55));
      ch.push_back(check_positive("C66>0", C66));
      ch.push_back(check_positive("C11*C22>C12^2", C11 * C22 - C12 * C12));
      const double lhs = C11 * C22 * C33 + 2.0 * C12 * C23 * C13;
      const double rhs = C11 * C23 * C23 + C22 * C13 * C13 + C33 * C12 * C12;
      ch.push_back(check_positive("C11*C22*C33+2*C12*C23*C13>C11*C23^2+C22*C13^2+C33*C12^2", lhs - rhs));
      if (C.symmetry_class == SymmetryClass::monoclinic) {
        const double C45 = C.C(4, 5);
        ch.push_back(check_positive("C44*C55>C45^2", C44 * C55 - C45 * C45));
        // The class list above does not bound the C16/C26/C36 couplings; the
        // full strain energy must still be positive definite.
        Eigen::SelfAdjointEigenSolver<Mat6> es(C.voigt, Eigen::EigenvaluesOnly);
        ch.push_back(check_positive("voigt_matrix_positive_definite(C16,C26,C36 coupling)",
                                    es.eigenvalues().minCoeff()));
      }
      break;
    }
  }
  r.pass = true;
  for (const auto& c : ch) {
    if (!c.holds) {
      r.pass = false;
      r.violated.push_back(c.name);
    }
  }
  return r;
}

std::string to_string(TIBranch b) {
  switch (b) {
    case TIBranch::not_applicable: return "not_applicable";
    case TIBranch::nondegenerate: return "nondegenerate";
    case TIBranch::degenerate: return "degenerate";
    case TIBranch::complex_roots: return "complex_roots";
  }
  return "unknown";
}

ConstraintReport check_construction_constraints(const ElasticTensor& C) {
  ConstraintReport r;
  r.symmetry_class = C.symmetry_class;
  const double s = C.max_entry();
  const double C11 = C.C(1, 1), C12 = C.C(1, 2), C13 = C.C(1, 3), C23 = C.C(2, 3), C33 = C.C(3, 3),
               C44 = C.C(4, 4), C55 = C.C(5, 5), C66 = C.C(6, 6);
  auto& ch = r.checks;
  switch (C.symmetry_class) {
    case SymmetryClass::isotropic:
      // Isotropic media need no special relation; the strain map applies directly.
      break;
    case SymmetryClass::cubic:
      ch.push_back(check_zero("C12+C44=0", C12 + C44, s));
      break;
    case SymmetryClass::orthotropic:
      ch.push_back(check_nonzero("C33!=C44", C33 - C44, s));
      ch.push_back(check_nonzero("C44!=C55", C44 - C55, s));
      ch.push_back(check_nonzero("C33!=C55", C33 - C55, s));
      ch.push_back(check_zero("C12+C66=0", C12 + C66, s));
      ch.push_back(check_zero("C13+C55=0", C13 + C55, s));
      ch.push_back(check_zero("C23+C44=0", C23 + C44, s));
      break;
    case SymmetryClass::monoclinic:
      ch.push_back(check_nonzero("C16!=0", C.C(1, 6), s));
      ch.push_back(check_zero("C36=0", C.C(3, 6), s));
      ch.push_back(check_zero("C45=0", C.C(4, 5), s));
      ch.push_back(check_zero("C13+C55=0", C13 + C55, s));
      ch.push_back(check_zero("C23+C44=0", C23 + C44, s));
      break;
    case SymmetryClass::transversely_isotropic: {
      const NamedCheck zero = check_zero("C13+C44=0", C13 + C44, s);
      r.ti_c13_plus_c44_zero = zero.holds;
      ch.push_back(zero);
      const double d = (std::sqrt(C11 * C33) - C13 - 2.0 * C44) / s;
      r.ti_degeneracy = d;
      if (std::abs(d) <= kConstraintTol) {
        r.ti_branch = TIBranch::degenerate;
      } else if (d > 0) {
        r.ti_branch = TIBranch::nondegenerate;
      } else {
        r.ti_branch = TIBranch::complex_roots;
      }
      ch.push_back(NamedCheck{"sqrt(C11*C33)-C13-2*C44>=0", d, r.ti_branch != TIBranch::complex_roots});
      r.satisfied = r.ti_c13_plus_c44_zero || r.ti_branch != TIBranch::complex_roots;
      return r;
    }
  }
  r.satisfied = true;
  for (const auto& c : ch) r.satisfied = r.satisfied && c.holds;
  return r;
}

std::string to_string(ScaleKind k) {
  switch (k) {
    case ScaleKind::cubic_t: return "cubic_t";
    case ScaleKind::transiso_v: return "transiso_v";
    case ScaleKind::transiso_s: return "transiso_s";
    case ScaleKind::ortho_s1s2: return "ortho_s1s2";
    case ScaleKind::isotropic_none: return "isotropic_none";
  }
  return "unknown";
}

double ti_quartic_residual(const ElasticTensor& C, double v) {
  const double C11 = C.C(1, 1), C13 = C.C(1, 3), C33 = C.C(3, 3), C44 = C.C(4, 4);
  const double v2 = v * v;
  const double b = C11 * C33 + C44 * C44 - (C13 + C44) * (C13 + C44);
  const double res = C33 * C44 * v2 * v2 - b * v2 + C11 * C44;
  return std::abs(res) / std::abs(C11 * C44);
}

ScaleFactors scale_factors(const ElasticTensor& C) {
  ScaleFactors f;
  switch (C.symmetry_class) {
    case SymmetryClass::isotropic:
      f.kind = ScaleKind::isotropic_none;
      return f;
    case SymmetryClass::cubic:
      f.kind = ScaleKind::cubic_t;
      f.t = std::sqrt(C.C(4, 4) / C.C(1, 1));
      return f;
    case SymmetryClass::orthotropic:
    case SymmetryClass::monoclinic:
      f.kind = ScaleKind::ortho_s1s2;
      f.s1 = std::sqrt(C.C(3, 3) / C.C(5, 5));
      f.s2 = std::sqrt(C.C(3, 3) / C.C(4, 4));
      return f;
    case SymmetryClass::transversely_isotropic:
      break;
  }
  const double C11 = C.C(1, 1), C13 = C.C(1, 3), C33 = C.C(3, 3), C44 = C.C(4, 4);
  const ConstraintReport cr = check_construction_constraints(C);
  if (cr.ti_c13_plus_c44_zero) {
    f.kind = ScaleKind::transiso_s;
    f.t = std::sqrt(C44 / C33);
  } else {
    f.kind = ScaleKind::transiso_v;
  }
  // Quartic in v solved as a quadratic in w = v^2: a w^2 - b w + c = 0.
  const double a = C33 * C44;
  const double b = C11 * C33 + C44 * C44 - (C13 + C44) * (C13 + C44);
  const double c = C11 * C44;
  const double disc = b * b - 4.0 * a * c;
  if (cr.ti_branch == TIBranch::degenerate) {
    f.degenerate = true;
    f.v = f.v1 = f.v2 = std::pow(C11 / C33, 0.25);
  } else if (cr.ti_branch == TIBranch::complex_roots || disc < 0.0 || b <= 0.0) {
    if (f.kind == ScaleKind::transiso_s) return f;  // the C13+C44=0 path does not need v
    std::ostringstream os;
    os << "quartic for v has no positive real root: discriminant b^2-4ac = " << disc
       << " (b=" << b << ", a=" << a << ", c=" << c << ")";
    throw DomainError(os.str());
  } else {
    const double w1 = (b + std::sqrt(disc)) / (2.0 * a);
    const double w2 = c / (a * w1);  // product of roots avoids cancellation
    f.v1 = std::sqrt(w1);
    f.v2 = std::sqrt(w2);
    f.v = f.v1;
  }
  f.quartic_residual = std::max(ti_quartic_residual(C, f.v1), ti_quartic_residual(C, f.v2));
  if (f.kind == ScaleKind::transiso_v) {
    f.gamma = (C11 * C33 - C33 * C44 * f.v * f.v) / ((C13 + C44) * C11);
  }
  return f;
}

Vec3 stretch_diagonal(const ElasticTensor& C) {
  const ScaleFactors f = scale_factors(C);
  switch (f.kind) {
    case ScaleKind::cubic_t:
    case ScaleKind::transiso_s:
      return Vec3(1.0, 1.0, f.t);
    case ScaleKind::transiso_v:
      return Vec3(1.0, 1.0, f.v);
    case ScaleKind::ortho_s1s2:
      return Vec3(f.s1, f.s2, 1.0);
    case ScaleKind::isotropic_none:
      break;
  }
  return Vec3(1.0, 1.0, 1.0);
}

}  // namespace eshelby
