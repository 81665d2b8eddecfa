#include "tfrhss/fdm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfrhss {

void SolverConfig::validate() const {
  if (max_iterations < 0) throw SpecError("solver: max_iterations must be positive");
  if (!(tolerance > 0.0)) throw SpecError("solver: tolerance must be > 0");
  if (!(relaxation_factor > 0.0 && relaxation_factor < 2.0)) throw SpecError("solver: relaxation_factor must be in (0, 2)");
}

Field five_point_stencil(const Field& t) {
  const int n = t.n();
  Field d(n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double v = t(r, c);
      const double e = c + 1 < n ? t(r, c + 1) : v;
      const double w = c > 0 ? t(r, c - 1) : v;
      const double nn = r + 1 < n ? t(r + 1, c) : v;
      const double s = r > 0 ? t(r - 1, c) : v;
      d(r, c) = e + w + nn + s - 4.0 * v;
    }
  }
  return d;
}

Field solve(const SystemSpec& spec, const SolverConfig& config, SolveStats* stats) {
  config.validate();
  if (!spec.boundary.has_dirichlet()) throw SingularProblem("no dirichlet segment: steady problem is singular");
  const Masks masks = rasterize_masks(spec);
  if (masks.omega_b_dirichlet.empty())
    throw SingularProblem("dirichlet segments cover no boundary cell centre at this resolution");

  const int n = spec.grid.n_cells();
  const double dx = spec.grid.cell_size();
  const Field phi = source_field(spec);
  const int max_it = config.max_iterations > 0 ? config.max_iterations : 10 * n * n;
  const double omega = config.relaxation_factor;

  double t_init = 0.0;
  for (const auto& c : masks.omega_b_dirichlet) t_init += masks.dirichlet_value(c.row, c.col);
  t_init /= static_cast<double>(masks.omega_b_dirichlet.size());

  Field t(n, t_init);
  std::vector<double> rhs(t.size(), 0.0);
  std::vector<double> inv_diag(t.size(), 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t k = t.index(r, c);
      if (masks.dirichlet(r, c)) {
        t[k] = masks.dirichlet_value(r, c);
        continue;
      }
      rhs[k] = dx * dx * phi(r, c) / spec.conductivity;
      // a replicate ghost neighbour equals the cell itself and drops out of the diagonal
      const int real = (c + 1 < n) + (c > 0) + (r + 1 < n) + (r > 0);
      inv_diag[k] = 1.0 / real;
    }
  }

  auto relax = [&](int r, int c) -> double {
    const std::size_t k = t.index(r, c);
    if (masks.dirichlet[k]) return 0.0;
    double sum = rhs[k];
    if (c + 1 < n) sum += t[k + 1];
    if (c > 0) sum += t[k - 1];
    if (r + 1 < n) sum += t[k + n];
    if (r > 0) sum += t[k - n];
    const double delta = omega * (sum * inv_diag[k] - t[k]);
    t[k] += delta;
    return std::abs(delta);
  };

  // Interior cells have four real neighbours and are never Dirichlet (sinks
  // sit on the ring). Only the west neighbour is on the sequential chain.
  const double w4 = 0.25 * omega;
  auto interior_row = [&](int r) -> double {
    double max_update = 0.0;
    double* row = t.values().data() + static_cast<std::size_t>(r) * n;
    const double* up = row + n;
    const double* down = row - n;
    const double* b = rhs.data() + static_cast<std::size_t>(r) * n;
    double west = row[0];
    for (int c = 1; c + 1 < n; ++c) {
      const double old = row[c];
      const double partial = (1.0 - omega) * old + w4 * (b[c] + row[c + 1] + up[c] + down[c]);
      const double v = partial + w4 * west;
      row[c] = v;
      west = v;
      max_update = std::max(max_update, std::abs(v - old));
    }
    return max_update;
  };

  double last = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < max_it) {
    double max_update = 0.0;
    if (config.order == SweepOrder::lexicographic) {
      for (int r = 0; r < n; ++r) {
        if (r == 0 || r == n - 1) {
          for (int c = 0; c < n; ++c) max_update = std::max(max_update, relax(r, c));
          continue;
        }
        max_update = std::max(max_update, relax(r, 0));
        max_update = std::max(max_update, interior_row(r));
        max_update = std::max(max_update, relax(r, n - 1));
      }
    } else {
      for (int colour = 0; colour < 2; ++colour)
        for (int r = 0; r < n; ++r)
          for (int c = (r + colour) % 2; c < n; c += 2) max_update = std::max(max_update, relax(r, c));
    }
    ++it;
    last = max_update;
    if (!std::isfinite(max_update)) break;
    if (max_update < config.tolerance) {
      if (stats) *stats = {it, last};
      return t;
    }
  }
  throw NonConvergence(it, last);
}

Field residual(const SystemSpec& spec, const Field& field) {
  const int n = spec.grid.n_cells();
  if (field.n() != n) throw ShapeError("residual: field is " + std::to_string(field.n()) + "x" +
                                       std::to_string(field.n()) + ", grid is " + std::to_string(n));
  const Masks masks = rasterize_masks(spec);
  const Field phi = source_field(spec);
  const double inv_dx2 = 1.0 / (spec.grid.cell_size() * spec.grid.cell_size());
  Field d = five_point_stencil(field);
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = masks.dirichlet[k] ? 0.0 : spec.conductivity * d[k] * inv_dx2 + phi[k];
  return d;
}

}  // namespace tfrhss
