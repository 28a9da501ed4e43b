#include "eshelby/pipeline.hpp"

#include "eshelby/geometry.hpp"
#include "eshelby/io.hpp"
#include "eshelby/voxel_quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace eshelby {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json mat_json(const Mat3& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(ordered_json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

// Dumps with full double precision (nlohmann already round-trips doubles).
std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

ConsistencyReport potential_consistency(const VoxelRegion& region, const ObstacleSpec& spec) {
  if (region.empty()) throw InputError("self-consistency needs a non-empty region");
  const VoxelIntegrator integrator(region, [&](const Vec3& x) { return obstacle_density(spec, x); });
  const std::vector<Vec3> pts = region.centers();
  std::vector<double> err(pts.size()), phi(pts.size());
  parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      phi[i] = eval_obstacle(spec, pts[i]);
      err[i] = integrator.newtonian(pts[i]) - phi[i];
    }
  });
  ConsistencyReport r;
  r.samples = pts.size();
  double sq = 0.0;
  for (double e : err) {
    sq += e * e;
    r.max_error = std::max(r.max_error, std::abs(e));
  }
  r.rms_error = std::sqrt(sq / static_cast<double>(pts.size()));
  const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
  r.phi_range = *hi - *lo;
  r.relative_rms = r.phi_range > 0.0 ? r.rms_error / r.phi_range : 1.0;
  return r;
}

ConstructOutcome run_construct(const RunConfig& cfg) {
  ConstructOutcome out;
  out.result = construct_coincidence(cfg.obstacle, cfg.construct);
  const ConstructResult& r = out.result;
  const StiffnessOperator K(r.grid);

  out.coincidence = extract_coincidence_set(r.V, r.phi, cfg.eps_coincidence);
  out.contact = extract_contact_region(K, r.V, r.phi, cfg.contact_fraction);
  out.empty = out.coincidence.empty();
  out.coincidence_components = connected_components(out.coincidence).count;
  out.contact_components = connected_components(out.contact).count;
  out.coincidence.component_count = out.coincidence_components;
  out.contact.component_count = out.contact_components;

  for (const Vec3& c : out.coincidence.centers()) out.containment_radius = std::max(out.containment_radius, c.norm());
  out.containment_bound = nominal_r0(cfg.obstacle) + 2.0 * r.grid.h();
  out.contained = out.containment_radius <= out.containment_bound;

  // The contact region lives in the primed frame x' = diag(q) x; the physical
  // inclusion is its image under diag(q)^-1.
  out.stretch = run_stretch(cfg);
  DiagonalStretch s;
  s.d = out.stretch;
  out.stretched = stretch_region(out.contact, s);
  out.stretched.component_count = out.contact_components;
  return out;
}

std::string construct_summary_json(const ConstructOutcome& o, const RunConfig& cfg) {
  const ConstructResult& r = o.result;
  ordered_json j;
  j["case"] = cfg.case_name;
  j["converged"] = r.converged;
  j["grid"] = {{"n", r.grid.n}, {"L", r.grid.L}, {"h", r.grid.h()}};
  j["solver"] = {{"boundary", to_string(cfg.construct.boundary)},
                 {"outer_iterations", r.outer_iterations},
                 {"total_iterations", r.total_iterations},
                 {"final_iterations", r.stats.iterations},
                 {"last_update", r.stats.last_update},
                 {"tolerance", r.stats.tolerance},
                 {"boundary_change", r.boundary_change},
                 {"boundary_max", r.boundary_max},
                 {"complementarity_residual", r.stats.complementarity_residual},
                 {"min_KV", r.stats.min_KV},
                 {"max_gap_KV", r.stats.max_gap_KV}};
  j["coincidence"] = {{"eps", cfg.eps_coincidence},
                      {"voxels", o.coincidence.count()},
                      {"components", o.coincidence_components},
                      {"containment_radius", o.containment_radius},
                      {"containment_bound", o.containment_bound},
                      {"contained", o.contained}};
  j["region"] = {{"contact_fraction", cfg.contact_fraction},
                 {"voxels", o.contact.count()},
                 {"components", o.contact_components}};
  j["stretch"] = vec_json(o.stretch);
  if (o.empty) j["note"] = "empty coincidence set";
  return dump(j);
}

void write_construct_outputs(const ConstructOutcome& o, const RunConfig& cfg, const std::string& dir) {
  ensure_directory(dir);
  const ConstructResult& r = o.result;
  VolumeData vol = volume_from_fields(r.grid, {{"V", &r.V}, {"phi", &r.phi}});
  add_region_array(vol, "coincidence", o.coincidence);
  add_region_array(vol, "region", o.contact);
  write_vtk(join(dir, "fields.vtk"), vol);
  write_field_csv(join(dir, "fields.csv"), vol);
  write_region_csv(join(dir, "coincidence.csv"), o.coincidence);
  write_region_csv(join(dir, "region.csv"), o.contact);
  write_region_csv(join(dir, "stretched_region.csv"), o.stretched);
  write_text_file(join(dir, "summary.json"), construct_summary_json(o, cfg));
}

VerifyOutcome run_verify(const VoxelRegion& region, const RunConfig& cfg) {
  if (!cfg.material) throw InputError("verify needs a material section");
  if (!cfg.eigenstrain) throw InputError("verify needs an eigenstrain section");
  validate_eigenstrain(*cfg.eigenstrain);
  if (region.empty()) throw InputError("region is empty");

  VerifyOutcome out;
  CertifyOptions options = cfg.certify;
  if (cfg.stretch && !options.stretch) options.stretch = cfg.stretch;
  out.certification = certify_polynomial_conservation(region, *cfg.material, *cfg.eigenstrain, options);

  // Ellipsoid comparison in the primed frame, where the potential is the
  // plain Newtonian one. Densities without a closed-form ellipsoid potential
  // fall back to a uniform density.
  DiagonalStretch inverse;
  inverse.d = out.certification.stretch.cwiseInverse();
  const VoxelRegion primed = stretch_region(region, inverse);
  const DensityPolynomial& rho = cfg.eigenstrain->density;
  const DensityPolynomial score_density = rho.form == DensityForm::even_monomial ? constant_density(1.0) : rho;
  out.non_ellipsoidality = non_ellipsoidality_score(primed, score_density);
  out.pass = out.certification.pass;
  return out;
}

std::string certification_json(const CertificationReport& c) {
  ordered_json j;
  j["strain_case"] = c.strain_case;
  j["degree"] = c.degree;
  j["tol_cert"] = c.tol_cert;
  j["residual_n"] = c.residual_n;
  j["residual_n1"] = c.residual_n1;
  j["incremental_energy"] = c.incremental_energy;
  j["field_rms"] = c.field_rms;
  j["component_rms"] = c.component_rms;
  j["degree_norms"] = c.degree_norms;
  j["scale_free"] = c.scale_free;
  j["samples"] = c.samples;
  j["flagged_samples"] = c.flagged_samples;
  j["stretch"] = vec_json(c.stretch);
  j["verdict"] = c.pass ? "PASS" : "FAIL";
  return dump(j);
}

std::string non_ellipsoidality_json(const NonEllipsoidalityReport& r) {
  ordered_json j;
  j["score"] = r.score;
  j["symmetric_difference"] = r.symmetric_difference;
  j["potential_mismatch"] = r.potential_mismatch;
  j["samples"] = r.samples;
  j["fitted_ellipsoid"] = {{"axes", vec_json(r.pose.axes.vec())},
                           {"rotation", mat_json(r.pose.rotation)},
                           {"translation", vec_json(r.pose.translation)}};
  return dump(j);
}

void write_verify_outputs(const VerifyOutcome& o, const std::string& dir) {
  ensure_directory(dir);
  write_text_file(join(dir, "certification.json"), certification_json(o.certification));
  write_text_file(join(dir, "non_ellipsoidality.json"), non_ellipsoidality_json(o.non_ellipsoidality));

  const CertificationReport& c = o.certification;
  std::ofstream csv(join(dir, "certification.csv"));
  if (!csv) throw InputError("cannot open '" + join(dir, "certification.csv") + "' for writing");
  static const int comp[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  static const char* names[6] = {"11", "22", "33", "23", "13", "12"};
  csv << "x,y,z";
  for (const char* n : names) csv << ",eps" << n << ",fit" << n;
  csv << '\n';
  for (std::size_t s = 0; s < c.points.size(); ++s) {
    csv << format_double(c.points[s][0]) << ',' << format_double(c.points[s][1]) << ','
        << format_double(c.points[s][2]);
    for (const auto& ij : comp)
      csv << ',' << format_double(c.strain[s](ij[0], ij[1])) << ',' << format_double(c.fitted[s](ij[0], ij[1]));
    csv << '\n';
  }
  if (!csv) throw InputError("write failed: certification.csv");
}

}  // namespace eshelby
