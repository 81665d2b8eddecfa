#pragma once

#include <optional>
#include <vector>

#include "tfrhss/grid.hpp"
#include "tfrhss/pirl_loss.hpp"

namespace tfrhss {

/// Gaussian interpolation over all sensors: T(p) = sum_i w_i(p) f_i with
/// w_i(p) proportional to exp(-d^2(p, s_i) / bandwidth^2), distances in metres
/// between cell centres.
Field ggi_reconstruct(const MonitoringInput& monitoring, const Grid& grid, double bandwidth = 1.0);

/// Bandwidth equal to the board side, i.e. distances measured in board widths.
double ggi_domain_bandwidth(const Grid& grid);

/// Bivariate polynomial of total degree <= `degree` in coordinates scaled to
/// [-1, 1] over the board. Terms ordered by total degree d, then x^(d-i) y^i.
struct PolyModel {
  int degree = 5;
  double side_length = 1.0;
  std::vector<double> coefficients;
  bool ridge = false;  // fitted with the ridge fallback

  static std::size_t term_count(int degree) { return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2); }
  double evaluate(Point p) const;
};

inline constexpr double kPolyRidge = 1e-8;

/// Least squares fit to one sample's own sensor readings. A rank-deficient
/// design falls back to ridge regression with lambda = kPolyRidge and sets
/// PolyModel::ridge.
PolyModel poly_fit(const MonitoringInput& monitoring, const Grid& grid, int degree = 5);
Field poly_reconstruct(const PolyModel& model, const Grid& grid);

struct DirectOptions {
  int steps = 500;
  double step_size = 1e-3;  // initial step; adapted by backtracking
  LossWeights weights;
  std::optional<Field> init;  // defaults to the sensor fill value everywhere
};

struct DirectResult {
  Field field;
  std::vector<double> loss_trace;  // total loss before the first step, then after each step
  int accepted = 0;
};

/// Gradient descent on the field values themselves. A step is only taken
/// when it does not increase the total loss (the step is halved until it
/// does, and grown by 1.5x after each success), so the trace never rises.
/// Raises NonFiniteError on a non-finite loss.
DirectResult direct_pirl_optimize(const MonitoringInput& monitoring, const Domain& domain, const DirectOptions& options);

}  // namespace tfrhss
