#pragma once

#include "eshelby/common.hpp"
#include "eshelby/obstacle.hpp"
#include "eshelby/region.hpp"

#include <functional>
#include <string>
#include <vector>

namespace eshelby {

// Uniform node grid on the cube [-L, L]^3 with n nodes per axis.
struct Grid {
  int n = 0;
  double L = 0.0;

  double h() const { return 2.0 * L / (n - 1); }
  double coord(int i) const { return -L + i * h(); }
  Vec3 point(int i, int j, int k) const { return Vec3(coord(i), coord(j), coord(k)); }
  std::size_t size() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n) * k);
  }
  bool is_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
  }
};

// Throws InputError for n < 16 and DomainError for L <= 0.
Grid make_grid(int n, double L);

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

ScalarField make_field(const Grid& grid, double value = 0.0);
ScalarField sample_field(const Grid& grid, const std::function<double(const Vec3&)>& f);
ScalarField sample_obstacle(const Grid& grid, const ObstacleSpec& spec);

// Matrix-free 7-point stiffness of the Dirichlet energy (1/2) int |grad v|^2
// on the grid: (K v)_i = h (6 v_i - sum of the six neighbours) at interior
// nodes, i.e. the energy-consistent (h^3 / h^2) scaling of -Laplacian.
// Boundary nodes are Dirichlet data: their rows are identically zero.
class StiffnessOperator {
 public:
  explicit StiffnessOperator(const Grid& grid) : grid_(grid) {}
  const Grid& grid() const { return grid_; }
  void apply(const std::vector<double>& v, std::vector<double>& out) const;
  // Dirichlet energy (1/2) sum over grid edges of h (v_a - v_b)^2, including
  // edges touching boundary nodes.
  double energy(const std::vector<double>& v) const;

 private:
  Grid grid_;
};

StiffnessOperator assemble_stiffness(const Grid& grid);

struct SolverOptions {
  double omega = 1.5;       // relaxation parameter in (0, 2)
  double tol = 1e-8;        // relative to max |phi|
  long max_iters = 0;       // 0 selects 200 n
  bool record_energy = false;
};

struct SolveStats {
  bool converged = false;
  long iterations = 0;
  double last_update = 0.0;     // max nodal update of the final sweep pair
  double tolerance = 0.0;       // absolute update threshold used
  std::vector<double> energy;   // Dirichlet energy after each iteration (if recorded)
  double min_KV = 0.0;          // min over interior nodes of (K V)_i
  double max_gap_KV = 0.0;      // max over interior nodes of |(V_i - phi_i)(K V)_i|
  double complementarity_residual = 0.0;  // max(-min_KV, max_gap_KV, 0)
};

struct SolveResult {
  ScalarField V;
  SolveStats stats;
};

// Projected SOR (red-black ordering) for
//   min (1/2) <K V, V>  s.t.  V >= phi at interior nodes, V = g on boundary,
// with g = 0 unless `boundary` is supplied (only its boundary entries are
// used). Starts from `initial` when given, otherwise from max(phi, 0).
// Throws InputError for non-finite phi or phi > g on a boundary node.
// Non-convergence is reported in the stats, not thrown.
SolveResult solve_obstacle_qp(const StiffnessOperator& K, const ScalarField& phi, const SolverOptions& options = {},
                              const ScalarField* boundary = nullptr, const ScalarField* initial = nullptr);

// Complementarity diagnostics of a candidate solution.
void complementarity(const StiffnessOperator& K, const ScalarField& V, const ScalarField& phi, SolveStats& stats);

// Interior nodes with |V - phi| <= eps, as a region on the node lattice.
// eps = 0 selects the active set (nodes where the constraint is exactly
// attained).
VoxelRegion extract_coincidence_set(const ScalarField& V, const ScalarField& phi, double eps = 1e-4);

// Active nodes whose discrete contact fraction (K V)_i / (K phi)_i is at
// least `min_fraction`. Rim nodes of the active set carry only part of their
// cell's source mass because the continuum free boundary crosses their cell;
// thresholding the fraction at 1/2 voxelizes the contact region without the
// half-cell outward bias of the raw active set. Nodes with (K phi)_i <= 0
// are kept whenever active.
VoxelRegion extract_contact_region(const StiffnessOperator& K, const ScalarField& V, const ScalarField& phi,
                                   double min_fraction = 0.5);

struct ComponentReport {
  int count = 0;
  std::vector<std::size_t> sizes;  // descending
  VoxelRegion largest;
};

// 6-connected components of the occupied voxels.
ComponentReport connected_components(const VoxelRegion& region);

enum class BoundaryMode { dirichlet_zero, far_field };
std::string to_string(BoundaryMode m);
BoundaryMode boundary_mode_from_string(const std::string& s);

struct ConstructOptions {
  int n = 64;
  double L = 0.0;  // 0 selects default_half_width(spec)
  SolverOptions solver;
  BoundaryMode boundary = BoundaryMode::far_field;
  int max_outer = 30;          // far-field outer iterations
  double outer_tol = 1e-6;     // max boundary-value change relative to max|phi|
  double outer_relaxation = 0.5;  // boundary update g <- g + theta (N - g)
};

struct ConstructResult {
  Grid grid;
  ScalarField phi;
  ScalarField V;
  SolveStats stats;            // stats of the final inner solve
  long total_iterations = 0;
  int outer_iterations = 0;
  bool converged = false;      // inner solve converged and outer loop settled
  double boundary_change = 0.0;
  double boundary_max = 0.0;   // max |g| on the boundary of the final solve
};

// Obstacle -> grid -> PSOR. In far-field mode the boundary values are the
// potential of the discrete measure (K V)_i carried by the active nodes,
// relaxed (outer_relaxation) and iterated until the boundary data settle; this
// approximates the whole-space problem instead of the truncated Dirichlet-0
// cube.
ConstructResult construct_coincidence(const ObstacleSpec& spec, const ConstructOptions& options);

}  // namespace eshelby
