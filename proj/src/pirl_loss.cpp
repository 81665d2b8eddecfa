#include "tfrhss/pirl_loss.hpp"

#include <cmath>

namespace tfrhss {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same(const Field& a, const Field& b, const char* what) {
  if (a.n() != b.n()) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace

void LossWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) throw SpecError("loss weights must be >= 0");
  if (!(tv_order > 0.0)) throw SpecError("tv_order must be > 0");
}

TermValue point_loss(const Field& pred, const MonitoringInput& monitoring) {
  require_same(pred, monitoring.values, "point_loss");
  if (!monitoring.layout) throw ShapeError("point_loss: monitoring input has no sensor layout");
  TermValue out{0.0, Field(pred.n(), 0.0)};
  for (const auto& s : monitoring.layout->positions) {
    const std::size_t k = pred.index(s.row, s.col);
    const double diff = pred[k] - monitoring.values[k];
    out.value += diff * diff;
    out.grad[k] = 2.0 * diff;
  }
  return out;
}

TermValue bc_loss(const Field& pred, const Masks& masks) {
  require_same(pred, masks.dirichlet_value, "bc_loss");
  TermValue out{0.0, Field(pred.n(), 0.0)};
  for (const auto& c : masks.omega_b_dirichlet) {
    const std::size_t k = pred.index(c.row, c.col);
    const double diff = pred[k] - masks.dirichlet_value[k];
    out.value += std::abs(diff);
    out.grad[k] = sign(diff);
  }
  return out;
}

TermValue laplace_loss(const Field& pred, const Mask& omega_e, const Grid& grid) {
  const int n = pred.n();
  if (omega_e.n() != n || grid.n_cells() != n) throw ShapeError("laplace_loss: shape mismatch");
  const double inv_dx2 = 1.0 / (grid.cell_size() * grid.cell_size());
  TermValue out{0.0, Field(n, 0.0)};
  auto& g = out.grad;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!omega_e(r, c)) continue;
      const double v = pred(r, c);
      const double e = c + 1 < n ? pred(r, c + 1) : v;
      const double w = c > 0 ? pred(r, c - 1) : v;
      const double nn = r + 1 < n ? pred(r + 1, c) : v;
      const double s = r > 0 ? pred(r - 1, c) : v;
      const double d = e + w + nn + s - 4.0 * v;
      out.value += std::abs(d) * inv_dx2;
      const double sg = sign(d) * inv_dx2;
      if (sg == 0.0) continue;
      // adjoint of the stencil; a ghost neighbour feeds back into the centre
      g(r, c) -= 4.0 * sg;
      (c + 1 < n ? g(r, c + 1) : g(r, c)) += sg;
      (c > 0 ? g(r, c - 1) : g(r, c)) += sg;
      (r + 1 < n ? g(r + 1, c) : g(r, c)) += sg;
      (r > 0 ? g(r - 1, c) : g(r, c)) += sg;
    }
  }
  return out;
}

TermValue tv_loss(const Field& pred, double order) {
  const int n = pred.n();
  TermValue out{0.0, Field(n, 0.0)};
  auto& g = out.grad;
  const bool quadratic = order == 2.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double v = pred(r, c);
      const double dh = c + 1 < n ? pred(r, c + 1) - v : 0.0;
      const double dv = r + 1 < n ? pred(r + 1, c) - v : 0.0;
      const double s = dh * dh + dv * dv;
      double coef;  // d(term)/d(s) * 2
      if (quadratic) {
        out.value += s;
        coef = 2.0;
      } else {
        if (s == 0.0) continue;
        out.value += std::pow(s, 0.5 * order);
        coef = order * std::pow(s, 0.5 * order - 1.0);
      }
      if (c + 1 < n) {
        g(r, c + 1) += coef * dh;
        g(r, c) -= coef * dh;
      }
      if (r + 1 < n) {
        g(r + 1, c) += coef * dv;
        g(r, c) -= coef * dv;
      }
    }
  }
  return out;
}

TotalLoss total_loss(const Field& pred, const MonitoringInput& monitoring, const Domain& domain,
                     const LossWeights& weights) {
  weights.validate();
  if (pred.n() != domain.n()) throw ShapeError("total_loss: prediction does not match the grid");
  const TermValue point = point_loss(pred, monitoring);
  const TermValue bc = bc_loss(pred, domain.masks);
  const TermValue lap = laplace_loss(pred, domain.masks.omega_e, domain.grid());
  const TermValue tv = tv_loss(pred, weights.tv_order);

  TotalLoss out;
  out.breakdown.point = point.value;
  out.breakdown.bc = bc.value;
  out.breakdown.laplace = lap.value;
  out.breakdown.tv = tv.value;
  out.breakdown.total =
      point.value + weights.alpha * bc.value + weights.beta * lap.value + weights.gamma * tv.value;
  out.grad = Field(pred.n(), 0.0);
  for (std::size_t k = 0; k < pred.size(); ++k)
    out.grad[k] = point.grad[k] + weights.alpha * bc.grad[k] + weights.beta * lap.grad[k] +
                  weights.gamma * tv.grad[k];
  return out;
}

}  // namespace tfrhss
