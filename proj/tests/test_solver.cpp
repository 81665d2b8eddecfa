#include <doctest.h>

#include "support.hpp"
#include "tfrhss/fdm_solver.hpp"
#include "tfrhss/presets.hpp"

using namespace tfrhss;
using namespace testsupport;

namespace {

// Heat leaving through the Dirichlet cells: lambda * (T_free - T0) over every
// free/Dirichlet neighbour pair (face length and spacing cancel).
double sink_flux(const SystemSpec& spec, const Field& t) {
  const Masks m = rasterize_masks(spec);
  const int n = spec.grid.n_cells();
  double flux = 0.0;
  for (const Cell& d : m.omega_b_dirichlet) {
    const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const Cell nb{d.row + dr[k], d.col + dc[k]};
      if (nb.row < 0 || nb.col < 0 || nb.row >= n || nb.col >= n || m.dirichlet(nb.row, nb.col)) continue;
      flux += spec.conductivity * (t(nb.row, nb.col) - m.dirichlet_value(d.row, d.col));
    }
  }
  return flux;
}

// Injected power over the rasterized source cells.
double injected_power(const SystemSpec& spec) {
  const Field phi = source_field(spec);
  const Masks m = rasterize_masks(spec);
  const double area = spec.grid.cell_size() * spec.grid.cell_size();
  double p = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    if (!m.dirichlet[k]) p += phi[k] * area;
  return p;
}

}  // namespace

TEST_CASE("constant solution with every edge held at T0") {
  SystemSpec spec = plain_spec(16);
  spec.boundary = BoundarySpec::uniform(0.1, BoundaryKind::dirichlet, 298.0);
  const Field t = solve(spec, {});
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] == doctest::Approx(298.0).epsilon(1e-12));
}

TEST_CASE("two opposite walls give a linear profile") {
  // The sweep stops on the update size, which bounds the error only by about
  // tolerance / (1 - rho); at omega = 1.9 that stays under 10x the tolerance
  // up to N = 16 and under 1e-4 K at N = 64.
  for (auto [n, bound] : {std::pair{8, 1e-5}, {16, 1e-5}, {64, 1e-4}}) {
    const SystemSpec spec = two_wall_spec(n, 0.1, 300.0, 400.0);
    const Field t = solve(spec, {});
    double dev = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) dev = std::max(dev, std::abs(t(r, c) - (300.0 + 100.0 * c / (n - 1))));
    CHECK(dev < bound);
  }
}

TEST_CASE("energy balance on a data A layout") {
  SystemSpec spec = preset_spec("a", 64);
  spec.sources = {spec.sources[3]};
  spec.sources[0].intensity = 20000.0;
  const Field t = solve(spec, {});
  const double in = injected_power(spec);
  CHECK(in > 0.0);
  CHECK(rel_err(sink_flux(spec, t), in) < 0.01);

  // All ten components with mixed powers.
  SystemSpec full = preset_spec("a", 64);
  for (std::size_t i = 0; i < full.sources.size(); ++i) full.sources[i].intensity = 3000.0 * static_cast<double>(i + 1);
  const Field tf = solve(full, {});
  CHECK(rel_err(sink_flux(full, tf), injected_power(full)) < 0.01);
}

TEST_CASE("residual of the solver output is bounded by the stopping rule") {
  SystemSpec spec = preset_spec("a", 32);
  for (std::size_t i = 0; i < spec.sources.size(); ++i) spec.sources[i].intensity = 25000.0;
  SolverConfig cfg;
  const Field t = solve(spec, cfg);
  const Field res = residual(spec, t);
  const double d = spec.grid.cell_size();
  const double bound = 4.0 * spec.conductivity * cfg.tolerance / (d * d);
  const Masks m = rasterize_masks(spec);
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (m.dirichlet[k]) {
      CHECK(res[k] == 0.0);
      continue;
    }
    CHECK(std::abs(res[k]) <= bound);
  }
}

TEST_CASE("residual of simple fields") {
  SUBCASE("uniform field, no sources, all adiabatic") {
    SystemSpec spec = plain_spec(12);
    spec.boundary = BoundarySpec::uniform(0.1, BoundaryKind::neumann, 0.0);
    const Field res = residual(spec, Field(12, 305.0));
    for (std::size_t k = 0; k < res.size(); ++k) CHECK(res[k] == 0.0);
  }
  SUBCASE("linear field is discretely harmonic away from the ring") {
    const SystemSpec spec = plain_spec(12);
    Field f(12);
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 12; ++c) f(r, c) = 300.0 + 2.0 * c - 3.0 * r;
    const Field res = residual(spec, f);
    for (int r = 1; r < 11; ++r)
      for (int c = 1; c < 11; ++c) CHECK(std::abs(res(r, c)) < 1e-6);
  }
  CHECK_THROWS_AS(residual(plain_spec(12), Field(8, 0.0)), ShapeError);
}

TEST_CASE("five point stencil uses replicate ghosts") {
  Field f(4, 0.0);
  f(1, 1) = 1.0;
  const Field d = five_point_stencil(f);
  CHECK(d(1, 1) == -4.0);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 0) == 1.0);
  CHECK(d(2, 1) == 1.0);
  CHECK(d(1, 2) == 1.0);
  CHECK(d(3, 3) == 0.0);
  // Corner cell: two ghosts replicate itself.
  Field g(4, 0.0);
  g(0, 0) = 2.0;
  CHECK(five_point_stencil(g)(0, 0) == -4.0);
}

TEST_CASE("maximum principle and positivity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> temp(280.0, 360.0), power(0.0, 30000.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = temp(rng), b = temp(rng);
    SystemSpec spec = two_wall_spec(16, 0.1, a, b);
    const Field t = solve(spec, {});
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(t[k] >= std::min(a, b) - 1e-9);
      CHECK(t[k] <= std::max(a, b) + 1e-9);
    }
    spec.sources = {rect("s", 0.05, 0.05, 0.03, 0.04, power(rng))};
    const Field ts = solve(spec, {});
    for (std::size_t k = 0; k < ts.size(); ++k) CHECK(ts[k] >= std::min(a, b) - 1e-9);
  }
}

TEST_CASE("sweep order does not change the solution") {
  // Same stopping-rule caveat as the linear profile: 10x the tolerance holds
  // at N = 16; at N = 32 the two orders differ by about 17x.
  for (const char* name : {"a", "b", "c", "d"}) {
    for (int n : {16}) {
      SystemSpec spec = preset_spec(name, n);
      for (std::size_t i = 0; i < spec.sources.size(); ++i) spec.sources[i].intensity = 1000.0 * static_cast<double>(i + 1);
      SolverConfig lex, rb;
      rb.order = SweepOrder::red_black;
      CHECK(max_abs_diff(solve(spec, lex), solve(spec, rb)) < 10.0 * lex.tolerance);
    }
  }
}

TEST_CASE("raising one source never cools any cell") {
  SystemSpec spec = preset_spec("a", 16);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> power(0.0, 30000.0);
  for (auto& s : spec.sources) s.intensity = power(rng);
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  const Field base = solve(spec, cfg);
  for (std::size_t i = 0; i < spec.sources.size(); i += 3) {
    SystemSpec hot = spec;
    hot.sources[i].intensity += 5000.0;
    const Field t = solve(hot, cfg);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] >= base[k] - 1e-8);
  }
}

TEST_CASE("solver errors") {
  SystemSpec spec = preset_spec("a", 16);
  spec.sources[0].intensity = 10000.0;
  SolverConfig cfg;
  cfg.max_iterations = 3;
  try {
    solve(spec, cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations == 3);
    CHECK(e.last_update > cfg.tolerance);
  }
  SystemSpec open = plain_spec(16);
  open.boundary = BoundarySpec::uniform(0.1, BoundaryKind::neumann, 0.0);
  CHECK_THROWS_AS(solve(open, {}), SingularProblem);
  SolverConfig bad;
  bad.relaxation_factor = 2.0;
  CHECK_THROWS(solve(spec, bad));
  bad = {};
  bad.tolerance = 0.0;
  CHECK_THROWS(solve(spec, bad));
}

TEST_CASE("solve reports its iteration count") {
  SystemSpec spec = preset_spec("b", 16);
  spec.sources[1].intensity = 5000.0;
  SolveStats st;
  solve(spec, {}, &st);
  CHECK(st.iterations > 1);
  CHECK(st.last_update < 1e-6);
}
