#include "eshelby/fbsolver.hpp"

#include "eshelby/kernels.hpp"
#include "eshelby/voxel_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace eshelby {

Grid make_grid(int n, double L) {
  if (n < 16) throw InputError("grid needs at least 16 nodes per axis (got " + std::to_string(n) + ")");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("grid half-width must be positive");
  return Grid{n, L};
}

ScalarField make_field(const Grid& grid, double value) { return ScalarField{grid, std::vector<double>(grid.size(), value)}; }

ScalarField sample_field(const Grid& grid, const std::function<double(const Vec3&)>& f) {
  ScalarField out = make_field(grid);
  const int n = grid.n;
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t kb, std::size_t ke) {
        for (int k = static_cast<int>(kb); k < static_cast<int>(ke); ++k)
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out.at(i, j, k) = f(grid.point(i, j, k));
      },
      4);
  return out;
}

ScalarField sample_obstacle(const Grid& grid, const ObstacleSpec& spec) {
  validate_spec(spec);
  return sample_field(grid, [&](const Vec3& x) { return eval_obstacle(spec, x); });
}

void StiffnessOperator::apply(const std::vector<double>& v, std::vector<double>& out) const {
  const int n = grid_.n;
  const double h = grid_.h();
  const std::size_t sx = 1, sy = static_cast<std::size_t>(n), sz = sy * sy;
  out.assign(grid_.size(), 0.0);
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t c = grid_.index(i, j, k);
        const double nb = v[c - sx] + v[c + sx] + v[c - sy] + v[c + sy] + v[c - sz] + v[c + sz];
        out[c] = h * (6.0 * v[c] - nb);
      }
}

double StiffnessOperator::energy(const std::vector<double>& v) const {
  const int n = grid_.n;
  const double h = grid_.h();
  long double e = 0.0L;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = grid_.index(i, j, k);
        if (i + 1 < n) {
          const long double d = v[c] - v[grid_.index(i + 1, j, k)];
          e += d * d;
        }
        if (j + 1 < n) {
          const long double d = v[c] - v[grid_.index(i, j + 1, k)];
          e += d * d;
        }
        if (k + 1 < n) {
          const long double d = v[c] - v[grid_.index(i, j, k + 1)];
          e += d * d;
        }
      }
  return static_cast<double>(0.5L * h * e);
}

StiffnessOperator assemble_stiffness(const Grid& grid) { return StiffnessOperator(make_grid(grid.n, grid.L)); }

void complementarity(const StiffnessOperator& K, const ScalarField& V, const ScalarField& phi, SolveStats& stats) {
  std::vector<double> kv;
  K.apply(V.values, kv);
  const Grid& g = K.grid();
  double min_kv = 0.0, max_gap = 0.0;
  bool first = true;
  for (int k = 1; k < g.n - 1; ++k)
    for (int j = 1; j < g.n - 1; ++j)
      for (int i = 1; i < g.n - 1; ++i) {
        const std::size_t c = g.index(i, j, k);
        if (first || kv[c] < min_kv) min_kv = kv[c];
        first = false;
        max_gap = std::max(max_gap, std::abs((V.values[c] - phi.values[c]) * kv[c]));
      }
  stats.min_KV = min_kv;
  stats.max_gap_KV = max_gap;
  stats.complementarity_residual = std::max({0.0, -min_kv, max_gap});
}

SolveResult solve_obstacle_qp(const StiffnessOperator& K, const ScalarField& phi, const SolverOptions& options,
                              const ScalarField* boundary, const ScalarField* initial) {
  const Grid& g = K.grid();
  if (phi.values.size() != g.size()) throw InputError("obstacle field does not match the stiffness grid");
  if (!(options.omega > 0.0 && options.omega < 2.0)) throw InputError("relaxation parameter must lie in (0, 2)");
  if (!(options.tol > 0.0)) throw InputError("solver tolerance must be positive");
  if (boundary && boundary->values.size() != g.size()) throw InputError("boundary field does not match the grid");
  if (initial && initial->values.size() != g.size()) throw InputError("initial field does not match the grid");

  double phi_max = 0.0;
  for (double p : phi.values) {
    if (!std::isfinite(p)) throw InputError("obstacle field contains non-finite values");
    phi_max = std::max(phi_max, std::abs(p));
  }

  SolveResult res{make_field(g), {}};
  std::vector<double>& V = res.V.values;
  const int n = g.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.index(i, j, k);
        if (g.is_boundary(i, j, k)) {
          const double b = boundary ? boundary->values[c] : 0.0;
          if (phi.values[c] > b)
            throw InputError("obstacle exceeds the boundary data at node (" + std::to_string(i) + "," +
                             std::to_string(j) + "," + std::to_string(k) + ")");
          V[c] = b;
        } else {
          const double start = initial ? initial->values[c] : 0.0;
          V[c] = std::max(start, phi.values[c]);
        }
      }

  const long max_iters = options.max_iters > 0 ? options.max_iters : 200L * n;
  const double tol_abs = options.tol * (phi_max > 0.0 ? phi_max : 1.0);
  res.stats.tolerance = tol_abs;
  if (options.record_energy) res.stats.energy.push_back(K.energy(V));

  auto sweep = [&](int color) {
    double delta = 0.0;
    std::mutex m;
    parallel_for(
        static_cast<std::size_t>(n - 2),
        [&](std::size_t b, std::size_t e) {
          const double d = kernels::psor_color_sweep(V.data(), phi.values.data(), n, n, static_cast<int>(b) + 1,
                                                     static_cast<int>(e) + 1, color, options.omega);
          std::lock_guard<std::mutex> lock(m);
          delta = std::max(delta, d);
        },
        8);
    return delta;
  };

  for (long it = 1; it <= max_iters; ++it) {
    const double d0 = sweep(0);
    const double d1 = sweep(1);
    const double delta = std::max(d0, d1);
    res.stats.iterations = it;
    res.stats.last_update = delta;
    if (options.record_energy) res.stats.energy.push_back(K.energy(V));
    if (delta <= tol_abs) {
      res.stats.converged = true;
      break;
    }
  }
  complementarity(K, res.V, phi, res.stats);
  return res;
}

VoxelRegion extract_coincidence_set(const ScalarField& V, const ScalarField& phi, double eps) {
  const Grid& g = V.grid;
  if (phi.grid.n != g.n || phi.grid.L != g.L) throw InputError("fields are not on the same grid");
  if (!(eps >= 0.0)) throw InputError("coincidence threshold must be non-negative");
  const double h = g.h();
  VoxelRegion r = make_region(Vec3::Constant(-g.L), Vec3::Constant(h), {g.n, g.n, g.n});
  for (int k = 1; k < g.n - 1; ++k)
    for (int j = 1; j < g.n - 1; ++j)
      for (int i = 1; i < g.n - 1; ++i) {
        const std::size_t c = g.index(i, j, k);
        if (std::abs(V.values[c] - phi.values[c]) <= eps) r.mask[c] = 1;
      }
  return r;
}

VoxelRegion extract_contact_region(const StiffnessOperator& K, const ScalarField& V, const ScalarField& phi,
                                   double min_fraction) {
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) throw InputError("contact fraction must lie in [0, 1]");
  VoxelRegion r = extract_coincidence_set(V, phi, 0.0);
  std::vector<double> kv, kphi;
  K.apply(V.values, kv);
  K.apply(phi.values, kphi);
  for (std::size_t c = 0; c < r.mask.size(); ++c)
    if (r.mask[c] && kphi[c] > 0.0 && kv[c] < min_fraction * kphi[c]) r.mask[c] = 0;
  return r;
}

ComponentReport connected_components(const VoxelRegion& region) {
  ComponentReport rep;
  std::vector<int> label(region.size(), -1);
  std::vector<std::array<int, 3>> stack;
  int largest_label = -1;
  std::size_t largest_size = 0;
  for (const auto& seed : region.occupied_indices()) {
    const std::size_t s = region.index(seed[0], seed[1], seed[2]);
    if (label[s] >= 0) continue;
    const int id = rep.count++;
    std::size_t size = 0;
    stack.push_back(seed);
    label[s] = id;
    while (!stack.empty()) {
      const auto p = stack.back();
      stack.pop_back();
      ++size;
      static const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      for (const auto& o : off) {
        const int i = p[0] + o[0], j = p[1] + o[1], k = p[2] + o[2];
        if (!region.occupied(i, j, k)) continue;
        const std::size_t c = region.index(i, j, k);
        if (label[c] >= 0) continue;
        label[c] = id;
        stack.push_back({i, j, k});
      }
    }
    rep.sizes.push_back(size);
    if (size > largest_size) {
      largest_size = size;
      largest_label = id;
    }
  }
  std::sort(rep.sizes.rbegin(), rep.sizes.rend());
  rep.largest = make_region(region.origin, region.spacing, region.dims);
  rep.largest.component_count = rep.count > 0 ? 1 : 0;
  if (largest_label >= 0)
    for (std::size_t c = 0; c < label.size(); ++c)
      if (label[c] == largest_label) rep.largest.mask[c] = 1;
  return rep;
}

std::string to_string(BoundaryMode m) { return m == BoundaryMode::far_field ? "far_field" : "dirichlet_zero"; }

BoundaryMode boundary_mode_from_string(const std::string& s) {
  if (s == "far_field") return BoundaryMode::far_field;
  if (s == "dirichlet_zero") return BoundaryMode::dirichlet_zero;
  throw InputError("unknown boundary mode '" + s + "' (expected far_field or dirichlet_zero)");
}

namespace {

// Whole-space potential of the discrete source measure of V, written into
// the boundary nodes of `g_field` as g + theta (N - g). With K = -h^3 Lap_h,
// V = sum_i (K V)_i / (4 pi |x - x_i|) over the nodes carrying mass; at a
// converged inner solve these are exactly the active nodes. The measure
// varies continuously with V, unlike the active set itself, so the outer
// iteration does not lock into a cycle of flipping boundary voxels.
// Returns max |N - g|, the fixed-point defect.
double update_far_field(const StiffnessOperator& K, const ScalarField& V, const ScalarField& phi,
                        ScalarField& g_field, double theta) {
  const Grid& g = g_field.grid;
  std::vector<double> kv;
  K.apply(V.values, kv);
  kernels::SourceCloud src;
  for (int k = 1; k < g.n - 1; ++k)
    for (int j = 1; j < g.n - 1; ++j)
      for (int i = 1; i < g.n - 1; ++i) {
        const std::size_t c = g.index(i, j, k);
        if (V.values[c] == phi.values[c] && kv[c] != 0.0) {
          const Vec3 p = g.point(i, j, k);
          src.push(p[0], p[1], p[2], kv[c] / (4.0 * pi));
        }
      }
  std::vector<std::size_t> nodes;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i)
        if (g.is_boundary(i, j, k)) nodes.push_back(g.index(i, j, k));
  std::vector<double> next(nodes.size(), 0.0);
  if (src.size() > 0) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    parallel_for(
        nodes.size(),
        [&](std::size_t b, std::size_t e) {
          for (std::size_t m = b; m < e; ++m) {
            const std::size_t c = nodes[m];
            const int i = static_cast<int>(c % n), j = static_cast<int>((c / n) % n), k = static_cast<int>(c / (n * n));
            next[m] = kernels::inverse_distance_sum(src, g.point(i, j, k));
          }
        },
        64);
  }
  double change = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    const double d = next[m] - g_field.values[nodes[m]];
    change = std::max(change, std::abs(d));
    g_field.values[nodes[m]] += theta * d;
  }
  return change;
}

}  // namespace

ConstructResult construct_coincidence(const ObstacleSpec& spec, const ConstructOptions& options) {
  validate_spec(spec);
  const double L = options.L > 0.0 ? options.L : default_half_width(spec);
  ConstructResult res;
  res.grid = make_grid(options.n, L);
  res.phi = sample_obstacle(res.grid, spec);
  const StiffnessOperator K(res.grid);
  double phi_max = 0.0;
  for (double p : res.phi.values) phi_max = std::max(phi_max, std::abs(p));

  ScalarField g_field = make_field(res.grid);
  const int outer_max = options.boundary == BoundaryMode::far_field ? std::max(1, options.max_outer) : 1;
  ScalarField* warm = nullptr;
  bool settled = options.boundary == BoundaryMode::dirichlet_zero;
  for (int outer = 1; outer <= outer_max; ++outer) {
    SolveResult sr = solve_obstacle_qp(K, res.phi, options.solver, &g_field, warm);
    res.V = std::move(sr.V);
    res.stats = std::move(sr.stats);
    res.total_iterations += res.stats.iterations;
    res.outer_iterations = outer;
    warm = &res.V;
    if (options.boundary == BoundaryMode::dirichlet_zero) break;
    double gmax = 0.0;
    for (int k = 0; k < res.grid.n; ++k)
      for (int j = 0; j < res.grid.n; ++j)
        for (int i = 0; i < res.grid.n; ++i)
          if (res.grid.is_boundary(i, j, k)) gmax = std::max(gmax, std::abs(g_field.at(i, j, k)));
    res.boundary_max = gmax;
    ScalarField next = g_field;
    res.boundary_change = update_far_field(K, res.V, res.phi, next, options.outer_relaxation);
    if (res.boundary_change <= options.outer_tol * (phi_max > 0.0 ? phi_max : 1.0)) {
      settled = true;
      break;
    }
    // Far-field data must stay above the obstacle on the boundary.
    for (std::size_t c = 0; c < next.values.size(); ++c) next.values[c] = std::max(next.values[c], res.phi.values[c]);
    g_field = std::move(next);
  }
  res.converged = res.stats.converged && settled;
  return res;
}

}  // namespace eshelby
