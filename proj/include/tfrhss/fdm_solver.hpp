#pragma once

#include <stdexcept>
#include <string>

#include "tfrhss/grid.hpp"

namespace tfrhss {

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(int iterations, double last_update)
      : std::runtime_error("solver did not converge after " + std::to_string(iterations) +
                           " sweeps (last max update " + std::to_string(last_update) + " K)"),
        iterations(iterations),
        last_update(last_update) {}
  int iterations;
  double last_update;
};

class SingularProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepOrder { lexicographic, red_black };

struct SolverConfig {
  int max_iterations = 0;      // 0 selects 10 * N^2
  double tolerance = 1e-6;     // K, max absolute update per sweep
  double relaxation_factor = 1.9;
  SweepOrder order = SweepOrder::lexicographic;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double last_update = 0.0;
};

/// Steady conduction by successive over-relaxation on the cell grid.
/// Dirichlet cells are clamped; Neumann edges use replicate ghost cells, so at
/// convergence every free cell satisfies
///   T = (T_E + T_W + T_N + T_S + dx^2 * phi / lambda) / 4.
Field solve(const SystemSpec& spec, const SolverConfig& config, SolveStats* stats = nullptr);

/// lambda * D(T) / dx^2 + phi per cell (five-point stencil, replicate ghosts),
/// zero on Dirichlet cells.
Field residual(const SystemSpec& spec, const Field& field);

/// Five-point stencil D = T_E + T_W + T_N + T_S - 4T with replicate ghosts.
Field five_point_stencil(const Field& field);

}  // namespace tfrhss
