#pragma once

#include <memory>
#include <stdexcept>

#include "tfrhss/grid.hpp"

namespace tfrhss {

/// A loss or gradient evaluated to NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sensor readings spread onto the grid: reading at sensor cells, fill value
/// elsewhere. The layout disambiguates a reading that happens to equal the fill.
struct MonitoringInput {
  Field values;
  std::shared_ptr<const SensorLayout> layout;
};

struct LossWeights {
  double alpha = 1e-3;  // boundary
  double beta = 1e-3;   // laplace
  double gamma = 1e-2;  // total variation
  double tv_order = 2.0;

  void validate() const;
};

/// Raw term values (unweighted) and the weighted total.
struct LossBreakdown {
  double point = 0.0;
  double bc = 0.0;
  double laplace = 0.0;
  double tv = 0.0;
  double total = 0.0;
};

struct TermValue {
  double value = 0.0;
  Field grad;
};

/// Sum over sensors of (T - f)^2.
TermValue point_loss(const Field& pred, const MonitoringInput& monitoring);

/// Sum over Dirichlet ring cells of |T - T0|; subgradient 0 at ties.
TermValue bc_loss(const Field& pred, const Masks& masks);

/// Sum over omega_e of |D / dx^2|, D the five-point stencil on the
/// replicate-padded field.
TermValue laplace_loss(const Field& pred, const Mask& omega_e, const Grid& grid);

/// Sum over anchors of (dx^2 + dy^2)^(order/2) using forward differences;
/// differences that would leave the grid are omitted.
TermValue tv_loss(const Field& pred, double order = 2.0);

struct TotalLoss {
  LossBreakdown breakdown;
  Field grad;
};

TotalLoss total_loss(const Field& pred, const MonitoringInput& monitoring, const Domain& domain,
                     const LossWeights& weights);

}  // namespace tfrhss
