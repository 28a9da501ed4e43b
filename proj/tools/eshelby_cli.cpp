// Command-line driver: construct, verify, ellipsoid, material, green, export.
//
// Exit codes: 0 ok / pass, 1 input or domain error, 2 solver non-convergence,
// 3 verification failure.

#include "eshelby/config.hpp"
#include "eshelby/ellipsoid_potential.hpp"
#include "eshelby/greens_ti.hpp"
#include "eshelby/io.hpp"
#include "eshelby/kernels.hpp"
#include "eshelby/materials.hpp"
#include "eshelby/pipeline.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace eshelby;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitVerifyFail = 3;

struct GlobalOptions {
  std::string config;
  std::string out;
  std::string case_name = "custom";
  double eps_coincidence = 1e-4;
  bool eps_given = false;
  int threads = 0;
  std::string isa = "auto";
};

Vec3 to_vec3(const std::vector<double>& v, const std::string& what) {
  if (v.size() != 3) throw InputError(what + " needs exactly three comma-separated numbers");
  return Vec3(v[0], v[1], v[2]);
}

// --config wins; otherwise a named case loads its bundled preset.
RunConfig resolve_config(const GlobalOptions& g, bool required) {
  RunConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
  } else if (g.case_name != "custom") {
    cfg = preset_config(g.case_name);
  } else if (required) {
    throw InputError("no configuration: pass --config PATH or --case omega1|omega2");
  }
  if (g.eps_given) {
    if (!(g.eps_coincidence >= 0.0)) throw ConfigError("--eps-coincidence", "must be non-negative");
    cfg.eps_coincidence = g.eps_coincidence;
  }
  if (!g.out.empty()) cfg.output_dir = g.out;
  return cfg;
}

void print_line(const std::string& key, double value) { std::printf("%s=%s\n", key.c_str(), format_double(value).c_str()); }

void print_matrix(const std::string& name, const Mat3& m) {
  for (int i = 0; i < 3; ++i) {
    std::printf("%s[%d]=", name.c_str(), i + 1);
    for (int j = 0; j < 3; ++j) std::printf("%s%s", j ? "," : "", format_double(m(i, j)).c_str());
    std::printf("\n");
  }
}

int cmd_construct(const GlobalOptions& g) {
  const RunConfig cfg = resolve_config(g, true);
  const ConstructOutcome o = run_construct(cfg);
  write_construct_outputs(o, cfg, cfg.output_dir);
  const ConstructResult& r = o.result;
  std::printf("grid n=%d L=%s h=%s\n", r.grid.n, format_double(r.grid.L).c_str(), format_double(r.grid.h()).c_str());
  std::printf("iterations total=%ld outer=%d converged=%s\n", r.total_iterations, r.outer_iterations,
              r.converged ? "yes" : "no");
  std::printf("coincidence voxels=%zu components=%d containment_radius=%s bound=%s contained=%s\n",
              o.coincidence.count(), o.coincidence_components, format_double(o.containment_radius).c_str(),
              format_double(o.containment_bound).c_str(), o.contained ? "yes" : "no");
  std::printf("region voxels=%zu components=%d\n", o.contact.count(), o.contact_components);
  if (o.empty) std::printf("note: empty coincidence set\n");
  std::printf("outputs written to %s\n", cfg.output_dir.c_str());
  if (!r.converged) {
    std::fprintf(stderr, "error: solver did not converge (last update %s, tolerance %s, boundary change %s)\n",
                 format_double(r.stats.last_update).c_str(), format_double(r.stats.tolerance).c_str(),
                 format_double(r.boundary_change).c_str());
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_verify(const GlobalOptions& g, const std::string& region_path) {
  const RunConfig cfg = resolve_config(g, true);
  const VoxelRegion region = read_region_csv(region_path);
  const VerifyOutcome o = run_verify(region, cfg);
  write_verify_outputs(o, cfg.output_dir);
  const CertificationReport& c = o.certification;
  std::printf("case=%s degree=%d samples=%zu\n", c.strain_case.c_str(), c.degree, c.samples);
  print_line("residual_n", c.residual_n);
  print_line("residual_n1", c.residual_n1);
  print_line("incremental_energy", c.incremental_energy);
  print_line("non_ellipsoidality", o.non_ellipsoidality.score);
  std::printf("verdict=%s\n", o.pass ? "PASS" : "FAIL");
  return o.pass ? kExitOk : kExitVerifyFail;
}

int cmd_ellipsoid(const std::vector<double>& axes_in, const std::vector<double>& point_in,
                  const std::string& density, double c0) {
  const Vec3 a = to_vec3(axes_in, "--axes");
  const Vec3 x = to_vec3(point_in, "--point");
  EllipsoidPose pose;
  pose.axes = EllipsoidAxes{a[0], a[1], a[2]};
  validate_pose(pose);
  if (!pose.contains(x)) throw DomainError("point lies outside the ellipsoid; only interior values are closed-form");
  double value = 0.0;
  if (density == "quadratic") {
    value = quadratic_density_potential(pose, quadratic_density_coefficients(pose), x);
  } else if (density == "constant") {
    value = constant_density_potential(pose.axes, c0, x);
  } else {
    throw InputError("unknown density '" + density + "' (expected quadratic or constant)");
  }
  std::printf("%s\n", format_double(value).c_str());
  return kExitOk;
}

int cmd_material(const GlobalOptions& g) {
  const RunConfig cfg = resolve_config(g, true);
  if (!cfg.material) throw ConfigError("material", "missing required section");
  const ElasticTensor& C = *cfg.material;
  std::printf("symmetry=%s\n", to_string(C.symmetry_class).c_str());
  for (const auto& [name, value] : independent_entries(C)) print_line(name, value);
  const ValidityReport v = validate_elastic_tensor(C);
  std::printf("positive_definite=%s\n", v.pass ? "yes" : "no");
  const ConstraintReport cr = check_construction_constraints(C);
  std::printf("construction_constraints=%s\n", cr.satisfied ? "satisfied" : "violated");
  for (const auto& chk : cr.checks)
    std::printf("check %s=%s holds=%s\n", chk.name.c_str(), format_double(chk.value).c_str(), chk.holds ? "yes" : "no");
  if (C.symmetry_class == SymmetryClass::transversely_isotropic) {
    std::printf("branch=%s\n", to_string(cr.ti_branch).c_str());
    print_line("degeneracy", cr.ti_degeneracy);
  }
  if (cr.satisfied) {
    const ScaleFactors s = scale_factors(C);
    std::printf("scale_kind=%s\n", to_string(s.kind).c_str());
    for (const auto& [name, value] :
         {std::pair{"t", s.t}, {"s1", s.s1}, {"s2", s.s2}, {"v", s.v}, {"v1", s.v1}, {"v2", s.v2}, {"gamma", s.gamma}})
      if (!std::isnan(value)) print_line(name, value);
    const Vec3 q = stretch_diagonal(C);
    std::printf("stretch=%s,%s,%s\n", format_double(q[0]).c_str(), format_double(q[1]).c_str(),
                format_double(q[2]).c_str());
  }
  return kExitOk;
}

int cmd_green(const GlobalOptions& g, const std::vector<double>& point_in) {
  const RunConfig cfg = resolve_config(g, true);
  if (!cfg.material) throw ConfigError("material", "missing required section");
  const Vec3 x = to_vec3(point_in, "--point");
  const TIGreenConstants k = ti_constants(*cfg.material);
  std::printf("branch=%s\n", k.degenerate ? "degenerate" : "nondegenerate");
  print_matrix("G", green_ti(k, x));
  return kExitOk;
}

// Region CSVs (header x,y,z) become a volume with one "region" array.
bool is_region_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("x,y,z", 0) == 0;
  }
  return false;
}

int cmd_export(const std::string& input, const std::string& format, const std::string& out) {
  VolumeData vol;
  if (is_region_csv(input)) {
    const VoxelRegion region = read_region_csv(input);
    vol.origin = region.origin;
    vol.spacing = region.spacing;
    vol.dims = region.dims;
    add_region_array(vol, "region", region);
  } else {
    vol = read_volume(input);
  }
  if (format == "vtk") {
    write_vtk(out, vol);
  } else if (format == "csv") {
    write_field_csv(out, vol);
  } else {
    throw InputError("unknown export format '" + format + "' (expected csv or vtk)");
  }
  std::printf("wrote %s (%zu points, %zu arrays)\n", out.c_str(), vol.size(), vol.arrays.size());
  return kExitOk;
}

void apply_runtime(const GlobalOptions& g) {
  if (g.threads < 0) throw InputError("--threads must be non-negative");
  if (g.threads > 0) set_max_threads(g.threads);
  if (g.isa == "auto") return;
  kernels::Isa isa;
  if (g.isa == "scalar") {
    isa = kernels::Isa::scalar;
  } else if (g.isa == "avx2") {
    isa = kernels::Isa::avx2;
  } else if (g.isa == "neon") {
    isa = kernels::Isa::neon;
  } else {
    throw InputError("unknown --isa '" + g.isa + "'");
  }
  if (!kernels::isa_available(isa)) throw InputError("instruction set '" + g.isa + "' is not available here");
  kernels::set_active_isa(isa);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic Eshelby counter-example inclusions: construction and verification"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--case", g.case_name, "Bundled preset when no --config is given")
      ->check(CLI::IsMember({"omega1", "omega2", "custom"}));
  auto* eps_opt = app.add_option("--eps-coincidence", g.eps_coincidence, "Coincidence tolerance |V - phi| <= eps");
  app.add_option("--threads", g.threads, "Worker-count cap (0 = hardware)");
  app.add_option("--isa", g.isa, "Kernel instruction set: auto, scalar, avx2, neon");

  auto* construct = app.add_subcommand("construct", "Solve the obstacle problem and extract the inclusion");

  std::string region_path;
  auto* verify = app.add_subcommand("verify", "Certify polynomial conservation of a region");
  verify->add_option("--region", region_path, "Region CSV in the physical frame")->required();

  std::vector<double> axes, point;
  std::string density = "quadratic";
  double c0 = 1.0;
  auto* ellipsoid = app.add_subcommand("ellipsoid", "Closed-form interior Newtonian potential of an ellipsoid");
  ellipsoid->add_option("--axes", axes, "Semi-axes a1,a2,a3")->required()->delimiter(',');
  ellipsoid->add_option("--point", point, "Point x1,x2,x3 (body frame)")->required()->delimiter(',');
  ellipsoid->add_option("--density", density, "quadratic (rho = -|x|^2) or constant");
  ellipsoid->add_option("--c0", c0, "Value of the constant density");

  auto* material = app.add_subcommand("material", "Validity, constraints and scale factors of the material");

  std::vector<double> green_point;
  auto* green = app.add_subcommand("green", "Transversely isotropic Green function at a point");
  green->add_option("--point", green_point, "Point x1,x2,x3")->required()->delimiter(',');

  std::string input, format, out_path;
  auto* exporter = app.add_subcommand("export", "Convert a field or region file between CSV and VTK");
  exporter->add_option("--input", input, "Field (.vtk/.csv) or region (.csv) file")->required();
  exporter->add_option("--format", format, "csv or vtk")->required()->check(CLI::IsMember({"csv", "vtk"}));
  exporter->add_option("--out", out_path, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  g.eps_given = eps_opt->count() > 0;

  try {
    apply_runtime(g);
    if (*construct) return cmd_construct(g);
    if (*verify) return cmd_verify(g, region_path);
    if (*ellipsoid) return cmd_ellipsoid(axes, point, density, c0);
    if (*material) return cmd_material(g);
    if (*green) return cmd_green(g, green_point);
    if (*exporter) return cmd_export(input, format, out_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
