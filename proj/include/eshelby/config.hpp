#pragma once

#include "eshelby/fbsolver.hpp"
#include "eshelby/materials.hpp"
#include "eshelby/obstacle.hpp"
#include "eshelby/verify.hpp"

#include <optional>
#include <string>

namespace eshelby {

// Configuration error carrying the JSON path of the offending field.
struct ConfigError : InputError {
  ConfigError(const std::string& field, const std::string& message)
      : InputError(field + ": " + message), field_path(field) {}
  std::string field_path;
};

// One run: material, obstacle, grid/solver, eigenstrain and output sections.
//
// {
//   "case": "omega1",
//   "material":   {"symmetry": "cubic", "C11": 4, "C12": -1, "C44": 1},
//   "obstacle":   {"family": "quartic", "C": 0.027777777777777776},
//   "grid":       {"n": 64, "L": 1.2, "omega": 1.5, "tol": 1e-8, "max_iters": 0,
//                  "boundary": "far_field", "max_outer": 30, "outer_tol": 1e-6,
//                  "outer_relaxation": 0.5},
//   "extraction": {"eps_coincidence": 1e-4, "contact_fraction": 0.5},
//   "eigenstrain":{"case": "cubic", "axis": 2,
//                  "density": {"form": "quadratic", "coefficients": [1, 1, 1]}},
//   "verify":     {"tol_cert": 0.05, "depth": 3, "max_samples": 1500},
//   "stretch":    [1, 1, 0.5],
//   "output":     "out/omega1"
// }
//
// Every section except "obstacle" is optional; "stretch" overrides the
// stretch diagonal q (x' = diag(q) x) derived from the material.
struct RunConfig {
  std::string case_name = "custom";
  std::optional<ElasticTensor> material;
  ObstacleSpec obstacle;
  ConstructOptions construct;
  double eps_coincidence = 1e-4;
  double contact_fraction = 0.5;
  std::optional<EigenstrainSpec> eigenstrain;
  CertifyOptions certify;
  std::optional<Vec3> stretch;
  std::string output_dir = "out";
};

// Parses and validates a configuration document. Every section is checked
// by its home module (tensor positive-definiteness, obstacle parameters,
// grid size, eigenstrain/material compatibility) before anything runs.
// Throws ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Directory holding the bundled presets (omega1.json, omega2.json, ...).
std::string preset_directory();
// Loads <preset_directory()>/<name>.json. Throws InputError for an unknown
// preset.
RunConfig preset_config(const std::string& name);

// Stretch diagonal q of the run: the explicit override, else the one of the
// eigenstrain case and material, else (1, 1, 1).
Vec3 run_stretch(const RunConfig& cfg);

// Serialises a configuration back to JSON (round-trips through parse_config).
std::string config_to_json(const RunConfig& cfg);

}  // namespace eshelby
