#include <doctest.h>

#include "support.hpp"
#include "tfrhss/config.hpp"
#include "tfrhss/presets.hpp"

using namespace tfrhss;
using namespace testsupport;

namespace {

// Stadium membership written independently of HeatSource::contains: distance
// from the core segment on the long axis no larger than the cap radius.
bool in_stadium(Point p, Point c, double length, double width) {
  const bool horizontal = length >= width;
  const double r = (horizontal ? width : length) / 2.0;
  const double half_core = (horizontal ? length : width) / 2.0 - r;
  double u = horizontal ? p.x - c.x : p.y - c.y;
  const double v = horizontal ? p.y - c.y : p.x - c.x;
  u = std::max(0.0, std::abs(u) - half_core);
  return u * u + v * v <= r * r;
}

std::size_t count(const Mask& m) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < m.size(); ++i) k += m[i] != 0;
  return k;
}

}  // namespace

TEST_CASE("grid rejects degenerate sizes") {
  CHECK_THROWS_AS(Grid(3, 1.0), SpecError);
  CHECK_THROWS_AS(Grid(8, 0.0), SpecError);
  const Grid g(200, 0.1);
  CHECK(std::abs(g.cell_size() * g.n_cells() - g.side_length()) < 1e-15);
}

TEST_CASE("zero sources leave omega_l empty") {
  const SystemSpec spec = plain_spec(16);
  const Masks m = rasterize_masks(spec);
  CHECK(count(m.omega_l) == 0);
  CHECK(count(m.omega_e) + count(m.dirichlet) == 16u * 16u);
  CHECK(m.omega_b.size() == 4u * 15u);
  // Sink of 0.01 m on a 0.1 m board with 16 cells covers the centres at
  // x = 0.046875 and 0.053125.
  CHECK(m.omega_b_dirichlet.size() == 2);
}

TEST_CASE("data A component c1 at N=200 covers a 20 x 20 block") {
  SystemSpec spec = plain_spec(200);
  spec.sources = {rect("c1", 0.0065, 0.079, 0.01, 0.01, 1.0)};
  const Masks m = rasterize_masks(spec);
  CHECK(count(m.omega_l) == 400);
  for (int r = 0; r < 200; ++r)
    for (int c = 0; c < 200; ++c) {
      const bool inside = r >= 148 && r <= 167 && c >= 3 && c <= 22;
      REQUIRE(static_cast<bool>(m.omega_l(r, c)) == inside);
    }
  // Same block appears in the full preset.
  const Masks full = rasterize_masks(preset_spec("a", 200));
  CHECK(full.omega_l(148, 3) == 1);
  CHECK(full.omega_l(167, 22) == 1);
}

TEST_CASE("capsule mask agrees with an independent stadium rasterizer") {
  for (int n : {64, 200}) {
    SystemSpec spec = plain_spec(n);
    HeatSource s = rect("c9", 0.0152, 0.0509, 0.01, 0.0195, 1.0);
    s.shape = Shape::capsule;
    spec.sources = {s};
    const Masks m = rasterize_masks(spec);
    std::size_t oracle = 0, super = 0;
    const double d = spec.grid.cell_size();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const bool in = in_stadium(spec.grid.center({r, c}), s.center, s.length, s.width);
        REQUIRE(static_cast<bool>(m.omega_l(r, c)) == in);
        oracle += in;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            super += in_stadium({(c + (b + 0.5) / 4.0) * d, (r + (a + 0.5) / 4.0) * d}, s.center, s.length, s.width);
      }
    // Centre sampling and 4x supersampling estimate the same area up to the
    // perimeter band.
    const double perimeter_cells = (2.0 * (s.width - s.length) + M_PI * s.length) / d;
    CHECK(std::abs(static_cast<double>(oracle) - super / 16.0) <= perimeter_cells);
  }
}

TEST_CASE("circle mask is symmetric about its centre") {
  SystemSpec spec = plain_spec(40, 1.0);
  HeatSource s = rect("c", 0.5, 0.5, 0.3, 0.3, 1.0);
  s.shape = Shape::circle;
  spec.sources = {s};
  const Masks m = rasterize_masks(spec);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 40; ++c) {
      CHECK(m.omega_l(r, c) == m.omega_l(39 - r, c));
      CHECK(m.omega_l(r, c) == m.omega_l(c, r));
    }
}

TEST_CASE("source_field sums intensities of covering sources") {
  SystemSpec spec = plain_spec(20, 1.0);
  SUBCASE("no sources") {
    const Field f = source_field(spec);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(f[k] == 0.0);
  }
  SUBCASE("one rectangle") {
    spec.sources = {rect("a", 0.5, 0.5, 0.4, 0.2, 10000.0)};
    const Field f = source_field(spec);
    const Masks m = rasterize_masks(spec);
    double total = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) total += f[k];
    CHECK(total == 10000.0 * count(m.omega_l));
    CHECK(count(m.omega_l) == 8 * 4);
  }
  SUBCASE("overlap adds") {
    spec.sources = {rect("a", 0.4, 0.5, 0.4, 0.4, 5000.0), rect("b", 0.6, 0.5, 0.4, 0.4, 7000.0)};
    const Field f = source_field(spec);
    CHECK(f(10, 10) == 12000.0);
    CHECK(f(10, 5) == 5000.0);
    CHECK(f(10, 14) == 7000.0);
  }
}

TEST_CASE("mask properties on the presets") {
  for (const auto& name : preset_names()) {
    const SystemSpec spec = preset_spec(name, 64);
    const Masks m = rasterize_masks(spec);
    const Field phi = source_field(spec.with_intensities(std::vector<double>(spec.sources.size(), 1.0)));
    for (std::size_t k = 0; k < m.omega_l.size(); ++k) {
      if (m.dirichlet[k]) {
        CHECK(m.omega_l[k] + m.omega_e[k] == 0);
        continue;
      }
      CHECK(m.omega_l[k] + m.omega_e[k] == 1);
      CHECK((phi[k] != 0.0) == static_cast<bool>(m.omega_l[k]));
    }
  }
}

TEST_CASE("rasterization is resolution consistent") {
  // A cell lying entirely inside a rectangle keeps all four children inside
  // after refinement.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 0.8), e(0.05, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const HeatSource s = rect("r", u(rng), u(rng), e(rng), e(rng), 1.0);
    SystemSpec coarse = plain_spec(16, 1.0), fine = plain_spec(32, 1.0);
    coarse.sources = fine.sources = {s};
    const Masks mf = rasterize_masks(fine);
    const double d = coarse.grid.cell_size();
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) {
        const bool fully = s.contains({c * d, r * d}) && s.contains({(c + 1) * d, r * d}) &&
                           s.contains({c * d, (r + 1) * d}) && s.contains({(c + 1) * d, (r + 1) * d});
        if (!fully) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) CHECK(mf.omega_l(2 * r + a, 2 * c + b) == 1);
      }
  }
}

TEST_CASE("spec validation") {
  SystemSpec spec = plain_spec(16, 1.0);
  SUBCASE("robin segments are rejected by the rasterizer") {
    spec.boundary.edge(Edge::bottom) = {{BoundaryKind::robin, 0.0, 1.0, 298.0, 10.0}};
    CHECK_THROWS_AS(rasterize_masks(spec), SpecError);
  }
  SUBCASE("edge gaps") {
    spec.boundary.edge(Edge::bottom) = {{BoundaryKind::neumann, 0.0, 0.5, 0.0, 0.0}};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("source outside the board") {
    spec.sources = {rect("x", 0.95, 0.5, 0.2, 0.2, 1.0)};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("negative intensity") {
    spec.sources = {rect("x", 0.5, 0.5, 0.2, 0.2, -1.0)};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("duplicate sensors") {
    spec.sensors.positions = {Cell{1, 1}, Cell{1, 1}};
    CHECK_THROWS_AS(spec.validate(), SpecError);
  }
  SUBCASE("no dirichlet segment") {
    spec.boundary = BoundarySpec::uniform(1.0, BoundaryKind::neumann, 0.0);
    CHECK_THROWS_AS(spec.validate(), SpecError);
    CHECK_NOTHROW(spec.validate(false));
  }
}

TEST_CASE("config text round trip") {
  for (const auto& name : preset_names()) {
    SystemSpec spec = preset_spec(name, 64);
    for (std::size_t i = 0; i < spec.sources.size(); ++i) spec.sources[i].intensity = 1000.0 * static_cast<double>(i) + 0.1;
    const std::string text = format_system_spec(spec);
    const SystemSpec back = parse_system_spec(text);
    CHECK(format_system_spec(back) == text);
    CHECK(spec_hash(back) == spec_hash(spec));
    CHECK(back.sensors.positions == spec.sensors.positions);
    CHECK(back.sources.size() == spec.sources.size());
    CHECK(back.sources.back().center.x == spec.sources.back().center.x);
  }
}

TEST_CASE("config errors") {
  const std::string good = format_system_spec(plain_spec(16));
  CHECK_NOTHROW(parse_system_spec(good));
  CHECK_THROWS_AS(parse_system_spec(good + "\n[grid]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_system_spec("[gird]\nn_cells = 16\n"), ConfigError);
  std::string bad = good;
  bad.replace(bad.find("n_cells = 16"), 12, "n_cells = x");
  CHECK_THROWS(parse_system_spec(bad));
}

TEST_CASE("presets reproduce the published sensor counts") {
  CHECK(preset_spec("a", 64).sensors.positions.size() == 124);
  CHECK(preset_spec("b", 64).sensors.positions.size() == 124);
  CHECK(preset_spec("c", 64).sensors.positions.size() == 133);
  CHECK(preset_spec("d", 64).sensors.positions.size() == 142);
  CHECK_THROWS_AS(preset_spec("e", 64), SpecError);
  // Component sensors sit on their component.
  const SystemSpec a = preset_spec("a", 64);
  const Masks m = rasterize_masks(a);
  std::size_t on = 0;
  for (const Cell& c : a.sensors.positions) on += m.omega_l(c.row, c.col);
  CHECK(on == 90);
}
