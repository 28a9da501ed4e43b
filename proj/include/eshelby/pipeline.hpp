#pragma once

#include "eshelby/config.hpp"
#include "eshelby/fbsolver.hpp"
#include "eshelby/region.hpp"
#include "eshelby/verify.hpp"

#include <string>

namespace eshelby {

// Agreement between the obstacle and the Newtonian potential of a region
// under the obstacle density, over the region's voxel centres.
struct ConsistencyReport {
  double rms_error = 0.0;
  double max_error = 0.0;
  double phi_range = 0.0;     // max - min of phi over the same centres
  double relative_rms = 0.0;  // rms_error / phi_range (1 for a degenerate range)
  std::size_t samples = 0;
};

// Throws InputError for an empty region.
ConsistencyReport potential_consistency(const VoxelRegion& region, const ObstacleSpec& spec);

// obstacle -> solver -> extraction -> stretch.
struct ConstructOutcome {
  ConstructResult result;
  VoxelRegion coincidence;  // |V - phi| <= eps on interior nodes
  VoxelRegion contact;      // contact region: the inclusion in the primed frame
  VoxelRegion stretched;    // contact region mapped to the physical frame
  Vec3 stretch = Vec3::Ones();
  int coincidence_components = 0;
  int contact_components = 0;
  double containment_radius = 0.0;  // max |x| over the coincidence set
  double containment_bound = 0.0;   // r0 + 2h
  bool contained = true;
  bool empty = false;
};

ConstructOutcome run_construct(const RunConfig& cfg);

// Writes fields.vtk, fields.csv, coincidence.csv, region.csv,
// stretched_region.csv and summary.json into `dir` (created if missing).
void write_construct_outputs(const ConstructOutcome& outcome, const RunConfig& cfg, const std::string& dir);
std::string construct_summary_json(const ConstructOutcome& outcome, const RunConfig& cfg);

struct VerifyOutcome {
  CertificationReport certification;
  NonEllipsoidalityReport non_ellipsoidality;
  bool pass = false;
};

// Certifies a physical-frame region against the eigenstrain of the config
// and scores the primed region diag(q) region against its fitted ellipsoid.
// Throws InputError when the config has no material or eigenstrain section.
VerifyOutcome run_verify(const VoxelRegion& region, const RunConfig& cfg);

// Writes certification.json, certification.csv and non_ellipsoidality.json.
void write_verify_outputs(const VerifyOutcome& outcome, const std::string& dir);
std::string certification_json(const CertificationReport& report);
std::string non_ellipsoidality_json(const NonEllipsoidalityReport& report);

}  // namespace eshelby
