#include "tfrhss/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tfrhss {

Field ggi_reconstruct(const MonitoringInput& monitoring, const Grid& grid, double bandwidth) {
  if (!monitoring.layout || monitoring.layout->positions.empty()) throw SpecError("ggi: at least one sensor is required");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw SpecError("ggi: bandwidth must be positive");
  if (monitoring.values.n() != grid.n_cells()) throw ShapeError("ggi: monitoring does not match the grid");
  const auto& sensors = monitoring.layout->positions;
  std::vector<Point> at(sensors.size());
  std::vector<double> reading(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    at[i] = grid.center(sensors[i]);
    reading[i] = monitoring.values(sensors[i].row, sensors[i].col);
  }
  const double inv_bw2 = 1.0 / (bandwidth * bandwidth);
  const int n = grid.n_cells();
  Field out(n, 0.0);
  std::vector<double> e(sensors.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Point p = grid.center({r, c});
      double min_e = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < at.size(); ++i) {
        const double dx = p.x - at[i].x, dy = p.y - at[i].y;
        e[i] = (dx * dx + dy * dy) * inv_bw2;
        min_e = std::min(min_e, e[i]);
      }
      // Shift by the smallest exponent so the largest weight is exactly 1.
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < at.size(); ++i) {
        const double w = std::exp(min_e - e[i]);
        num += w * reading[i];
        den += w;
      }
      out(r, c) = num / den;
    }
  return out;
}

double ggi_domain_bandwidth(const Grid& grid) { return grid.side_length(); }

namespace {

std::vector<double> monomials(double u, double v, int degree) {
  std::vector<double> out;
  out.reserve(PolyModel::term_count(degree));
  for (int d = 0; d <= degree; ++d)
    for (int i = 0; i <= d; ++i) out.push_back(std::pow(u, d - i) * std::pow(v, i));
  return out;
}

}  // namespace

double PolyModel::evaluate(Point p) const {
  const std::vector<double> m = monomials(2.0 * p.x / side_length - 1.0, 2.0 * p.y / side_length - 1.0, degree);
  double s = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) s += coefficients.at(k) * m[k];
  return s;
}

PolyModel poly_fit(const MonitoringInput& monitoring, const Grid& grid, int degree) {
  if (degree < 0 || degree > 12) throw SpecError("poly: degree must be in [0, 12]");
  if (!monitoring.layout || monitoring.layout->positions.empty()) throw SpecError("poly: at least one sensor is required");
  if (monitoring.values.n() != grid.n_cells()) throw ShapeError("poly: monitoring does not match the grid");
  const auto& sensors = monitoring.layout->positions;
  const auto terms = static_cast<Eigen::Index>(PolyModel::term_count(degree));
  const auto m = static_cast<Eigen::Index>(sensors.size());
  PolyModel model;
  model.degree = degree;
  model.side_length = grid.side_length();
  Eigen::MatrixXd a(m, terms);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Cell c = sensors[static_cast<std::size_t>(i)];
    const Point p = grid.center(c);
    const auto row = monomials(2.0 * p.x / model.side_length - 1.0, 2.0 * p.y / model.side_length - 1.0, degree);
    for (Eigen::Index k = 0; k < terms; ++k) a(i, k) = row[static_cast<std::size_t>(k)];
    b(i) = monitoring.values(c.row, c.col);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd x;
  if (qr.rank() == terms) {
    x = qr.solve(b);
  } else {
    model.ridge = true;
    const Eigen::MatrixXd normal = a.transpose() * a + kPolyRidge * Eigen::MatrixXd::Identity(terms, terms);
    x = normal.ldlt().solve(a.transpose() * b);
  }
  model.coefficients.assign(x.data(), x.data() + x.size());
  return model;
}

Field poly_reconstruct(const PolyModel& model, const Grid& grid) {
  const int n = grid.n_cells();
  Field out(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = model.evaluate(grid.center({r, c}));
  return out;
}

DirectResult direct_pirl_optimize(const MonitoringInput& monitoring, const Domain& domain, const DirectOptions& options) {
  if (options.steps < 1) throw SpecError("direct: steps must be >= 1");
  if (!(options.step_size > 0.0)) throw SpecError("direct: step size must be positive");
  const int n = domain.n();
  DirectResult res;
  res.field = options.init ? *options.init : Field(n, monitoring.layout ? monitoring.layout->fill_value : 0.0);
  if (res.field.n() != n) throw ShapeError("direct: initial field does not match the grid");

  auto evaluate = [&](const Field& f) {
    TotalLoss l = total_loss(f, monitoring, domain, options.weights);
    if (!std::isfinite(l.breakdown.total)) throw NonFiniteError("direct: non-finite loss");
    return l;
  };
  TotalLoss current = evaluate(res.field);
  res.loss_trace.push_back(current.breakdown.total);
  double eta = options.step_size;
  Field trial(n, 0.0);
  for (int step = 0; step < options.steps; ++step) {
    bool accepted = false;
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] = res.field[k] - eta * current.grad[k];
      TotalLoss next = evaluate(trial);
      if (next.breakdown.total <= current.breakdown.total) {
        std::swap(res.field, trial);
        current = std::move(next);
        accepted = true;
        eta *= 1.5;
      } else {
        eta *= 0.5;
      }
    }
    if (accepted) ++res.accepted;
    res.loss_trace.push_back(current.breakdown.total);
    if (!accepted) break;  // no descent along the (sub)gradient at any scale
  }
  return res;
}

}  // namespace tfrhss
