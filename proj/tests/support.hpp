#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tfrhss/grid.hpp"

namespace testsupport {

using namespace tfrhss;

inline Field random_field(int n, std::mt19937_64& rng, double lo = 290.0, double hi = 340.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field f(n);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

inline HeatSource rect(const std::string& name, double x, double y, double length, double width, double intensity) {
  HeatSource s;
  s.name = name;
  s.center = {x, y};
  s.length = length;
  s.width = width;
  s.intensity = intensity;
  return s;
}

/// Board of side `side` with a sink of a tenth of the side centred on the top
/// edge, no sources and one sensor in the middle.
inline SystemSpec plain_spec(int n, double side = 0.1, double t0 = 298.0) {
  SystemSpec s;
  s.grid = Grid(n, side);
  s.boundary = BoundarySpec::single_sink(Edge::top, side, side / 10.0, t0);
  s.sensors.positions = {Cell{n / 2, n / 2}};
  s.sensors.fill_value = t0;
  return s;
}

/// Left edge held at `left`, right edge at `right`, top and bottom adiabatic.
inline SystemSpec two_wall_spec(int n, double side, double left, double right) {
  SystemSpec s = plain_spec(n, side);
  s.boundary = BoundarySpec::uniform(side, BoundaryKind::neumann, 0.0);
  s.boundary.edge(Edge::left) = {{BoundaryKind::dirichlet, 0.0, side, left, 0.0}};
  s.boundary.edge(Edge::right) = {{BoundaryKind::dirichlet, 0.0, side, right, 0.0}};
  return s;
}

inline double rel_err(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace testsupport
