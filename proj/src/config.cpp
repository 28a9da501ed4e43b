#include "eshelby/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef ESHELBY_CONFIG_DIR
#define ESHELBY_CONFIG_DIR "configs"
#endif

namespace eshelby {

namespace {

using nlohmann::json;

// Typed accessors that report the JSON path of the offending field.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  Section sub(const std::string& key) const { return Section(at(key), field(key)); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

  std::string text(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  Vec3 vec3(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3) throw ConfigError(field(key), "expected an array of three numbers");
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
      if (!v[static_cast<std::size_t>(a)].is_number())
        throw ConfigError(field(key) + "[" + std::to_string(a) + "]", "expected a number");
      out[a] = v[static_cast<std::size_t>(a)].get<double>();
    }
    return out;
  }

  // Rejects keys outside `allowed` so that typos do not pass silently.
  void only(std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError(field(key), "missing required field");
    return j_.at(key);
  }

  const json& j_;
  std::string path_;
};

// Runs a home-module validation step and re-labels its error with a path.
template <class F>
auto checked(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

ElasticTensor parse_material(const Section& s) {
  const std::string sym = s.text("symmetry");
  const SymmetryClass cls = checked(s.field("symmetry"), [&] { return symmetry_class_from_string(sym); });
  std::map<std::string, double> entries;
  for (const char* key : {"lambda", "mu", "C11", "C12", "C13", "C22", "C23", "C33", "C44", "C55", "C66", "C16",
                          "C26", "C36", "C45"})
    if (s.has(key)) entries[key] = s.number(key);
  s.only({"symmetry", "lambda", "mu", "C11", "C12", "C13", "C22", "C23", "C33", "C44", "C55", "C66", "C16", "C26",
          "C36", "C45"});
  const ElasticTensor C = checked(s.field("symmetry"), [&] { return elastic_tensor_from_entries(cls, entries); });
  const ValidityReport v = checked(s.field("symmetry"), [&] { return validate_elastic_tensor(C); });
  if (!v.pass) {
    std::string msg = "tensor is not positive definite (violated:";
    for (const auto& name : v.violated) msg += " " + name;
    throw ConfigError(s.field("symmetry"), msg + ")");
  }
  return C;
}

ObstacleSpec parse_obstacle(const Section& s) {
  s.only({"family", "C", "beta", "n", "C_hat", "value"});
  ObstacleSpec o;
  o.family = checked(s.field("family"), [&] { return obstacle_family_from_string(s.text("family")); });
  o.C = s.number("C", o.C);
  o.beta = s.number("beta", o.beta);
  o.n = static_cast<int>(s.integer("n", o.n));
  o.C_hat = s.number("C_hat", o.C_hat);
  o.value = s.number("value", o.value);
  checked(s.field("family"), [&] {
    validate_spec(o);
    return 0;
  });
  return o;
}

void parse_grid(const Section& s, ConstructOptions& c) {
  s.only({"n", "L", "omega", "tol", "max_iters", "boundary", "max_outer", "outer_tol", "outer_relaxation"});
  c.n = static_cast<int>(s.integer("n", c.n));
  c.L = s.number("L", c.L);
  c.solver.omega = s.number("omega", c.solver.omega);
  c.solver.tol = s.number("tol", c.solver.tol);
  c.solver.max_iters = s.integer("max_iters", c.solver.max_iters);
  if (s.has("boundary"))
    c.boundary = checked(s.field("boundary"), [&] { return boundary_mode_from_string(s.text("boundary")); });
  c.max_outer = static_cast<int>(s.integer("max_outer", c.max_outer));
  c.outer_tol = s.number("outer_tol", c.outer_tol);
  c.outer_relaxation = s.number("outer_relaxation", c.outer_relaxation);
  if (c.n < 16) throw ConfigError(s.field("n"), "grid needs at least 16 nodes per axis");
  if (c.L < 0.0) throw ConfigError(s.field("L"), "half-width must be positive (or 0 for the default)");
  if (!(c.solver.omega > 0.0 && c.solver.omega < 2.0)) throw ConfigError(s.field("omega"), "must lie in (0, 2)");
  if (!(c.solver.tol > 0.0)) throw ConfigError(s.field("tol"), "must be positive");
  if (c.solver.max_iters < 0) throw ConfigError(s.field("max_iters"), "must be non-negative");
  if (c.max_outer < 1) throw ConfigError(s.field("max_outer"), "must be at least 1");
  if (!(c.outer_relaxation > 0.0 && c.outer_relaxation <= 1.0))
    throw ConfigError(s.field("outer_relaxation"), "must lie in (0, 1]");
}

DensityPolynomial parse_density(const Section& s) {
  s.only({"form", "c0", "coefficients", "degree"});
  const DensityForm form = checked(s.field("form"), [&] { return density_form_from_string(s.text("form")); });
  DensityPolynomial d;
  switch (form) {
    case DensityForm::constant:
      d = constant_density(s.number("c0", 1.0));
      break;
    case DensityForm::quadratic:
      d = quadratic_density(s.has("coefficients") ? s.vec3("coefficients") : Vec3::Ones());
      break;
    case DensityForm::even_monomial:
      d.form = form;
      d.degree = static_cast<int>(s.integer("degree"));
      d.coeffs = s.has("coefficients") ? s.vec3("coefficients") : Vec3::Ones();
      break;
  }
  checked(s.field("degree"), [&] {
    validate_density(d);
    return 0;
  });
  return d;
}

EigenstrainSpec parse_eigenstrain(const Section& s) {
  s.only({"case", "axis", "density"});
  EigenstrainSpec e;
  e.strain_case = checked(s.field("case"), [&] { return strain_case_from_string(s.text("case")); });
  const long axis = s.integer("axis", 2);
  e.P = checked(s.field("axis"), [&] { return uniaxial_direction(static_cast<int>(axis)); });
  e.density = parse_density(s.sub("density"));
  return e;
}

void parse_verify(const Section& s, CertifyOptions& c) {
  s.only({"tol_cert", "depth", "max_samples"});
  c.tol_cert = s.number("tol_cert", c.tol_cert);
  c.depth = static_cast<int>(s.integer("depth", c.depth));
  const long m = s.integer("max_samples", static_cast<long>(c.max_samples));
  if (!(c.tol_cert > 0.0)) throw ConfigError(s.field("tol_cert"), "must be positive");
  if (c.depth < 0) throw ConfigError(s.field("depth"), "must be non-negative");
  if (m < 0) throw ConfigError(s.field("max_samples"), "must be non-negative");
  c.max_samples = static_cast<std::size_t>(m);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  const Section root(doc, "");
  root.only({"case", "material", "obstacle", "grid", "extraction", "eigenstrain", "verify", "stretch", "output"});
  RunConfig cfg;
  cfg.case_name = root.text("case", cfg.case_name);
  if (root.has("material")) cfg.material = parse_material(root.sub("material"));
  cfg.obstacle = parse_obstacle(root.sub("obstacle"));
  if (root.has("grid")) parse_grid(root.sub("grid"), cfg.construct);
  if (root.has("extraction")) {
    const Section ex = root.sub("extraction");
    ex.only({"eps_coincidence", "contact_fraction"});
    cfg.eps_coincidence = ex.number("eps_coincidence", cfg.eps_coincidence);
    cfg.contact_fraction = ex.number("contact_fraction", cfg.contact_fraction);
    if (!(cfg.eps_coincidence >= 0.0)) throw ConfigError(ex.field("eps_coincidence"), "must be non-negative");
    if (!(cfg.contact_fraction >= 0.0 && cfg.contact_fraction <= 1.0))
      throw ConfigError(ex.field("contact_fraction"), "must lie in [0, 1]");
  }
  if (root.has("eigenstrain")) cfg.eigenstrain = parse_eigenstrain(root.sub("eigenstrain"));
  if (root.has("verify")) parse_verify(root.sub("verify"), cfg.certify);
  if (root.has("stretch")) {
    cfg.stretch = root.vec3("stretch");
    for (int a = 0; a < 3; ++a)
      if (!((*cfg.stretch)[a] > 0.0)) throw ConfigError("stretch", "factors must be positive");
  }
  cfg.output_dir = root.text("output", cfg.output_dir);

  // Cross-section consistency: the eigenstrain case must be usable with the
  // material before any solve starts.
  if (cfg.eigenstrain) {
    if (!cfg.material) throw ConfigError("material", "required by the eigenstrain section");
    if (!cfg.stretch)
      checked("eigenstrain.case", [&] { return strain_case_stretch(cfg.eigenstrain->strain_case, *cfg.material); });
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.field_path, std::string(e.what()).substr(e.field_path.size() + 2) + " (in " + path + ")");
  }
}

std::string preset_directory() {
  if (const char* env = std::getenv("ESHELBY_CONFIG_DIR")) return env;
  return ESHELBY_CONFIG_DIR;
}

RunConfig preset_config(const std::string& name) {
  const std::string path = preset_directory() + "/" + name + ".json";
  std::ifstream probe(path);
  if (!probe) throw InputError("unknown preset '" + name + "' (no " + path + ")");
  return load_config(path);
}

Vec3 run_stretch(const RunConfig& cfg) {
  if (cfg.stretch) return *cfg.stretch;
  if (cfg.eigenstrain && cfg.material) return strain_case_stretch(cfg.eigenstrain->strain_case, *cfg.material);
  if (cfg.material) return stretch_diagonal(*cfg.material);
  return Vec3::Ones();
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["case"] = cfg.case_name;
  if (cfg.material) {
    json m;
    m["symmetry"] = to_string(cfg.material->symmetry_class);
    for (const auto& [k, v] : independent_entries(*cfg.material)) m[k] = v;
    j["material"] = m;
  }
  json o;
  o["family"] = to_string(cfg.obstacle.family);
  switch (cfg.obstacle.family) {
    case ObstacleFamily::quartic:
      o["C"] = cfg.obstacle.C;
      break;
    case ObstacleFamily::quartic_log:
      o["C"] = cfg.obstacle.C;
      o["beta"] = cfg.obstacle.beta;
      break;
    case ObstacleFamily::even_degree_log:
      o["C"] = cfg.obstacle.C;
      o["beta"] = cfg.obstacle.beta;
      o["n"] = cfg.obstacle.n;
      o["C_hat"] = cfg.obstacle.C_hat;
      break;
    case ObstacleFamily::constant:
      o["value"] = cfg.obstacle.value;
      break;
  }
  j["obstacle"] = o;
  const auto& c = cfg.construct;
  j["grid"] = {{"n", c.n},
               {"L", c.L},
               {"omega", c.solver.omega},
               {"tol", c.solver.tol},
               {"max_iters", c.solver.max_iters},
               {"boundary", to_string(c.boundary)},
               {"max_outer", c.max_outer},
               {"outer_tol", c.outer_tol},
               {"outer_relaxation", c.outer_relaxation}};
  j["extraction"] = {{"eps_coincidence", cfg.eps_coincidence}, {"contact_fraction", cfg.contact_fraction}};
  if (cfg.eigenstrain) {
    const auto& e = *cfg.eigenstrain;
    int axis = 2;
    for (int a = 0; a < 3; ++a)
      if (e.P(a, a) == 1.0) axis = a;
    json d;
    d["form"] = to_string(e.density.form);
    if (e.density.form == DensityForm::constant) d["c0"] = e.density.c0;
    if (e.density.form != DensityForm::constant)
      d["coefficients"] = {e.density.coeffs[0], e.density.coeffs[1], e.density.coeffs[2]};
    if (e.density.form == DensityForm::even_monomial) d["degree"] = e.density.degree;
    j["eigenstrain"] = {{"case", to_string(e.strain_case)}, {"axis", axis}, {"density", d}};
  }
  j["verify"] = {{"tol_cert", cfg.certify.tol_cert},
                 {"depth", cfg.certify.depth},
                 {"max_samples", cfg.certify.max_samples}};
  if (cfg.stretch) j["stretch"] = {(*cfg.stretch)[0], (*cfg.stretch)[1], (*cfg.stretch)[2]};
  j["output"] = cfg.output_dir;
  return j.dump(2);
}

}  // namespace eshelby
