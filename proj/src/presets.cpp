#include "tfrhss/presets.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

namespace tfrhss {

namespace {

constexpr double kSide = 0.1;
constexpr double kSink = 0.01;
constexpr double kT0 = 298.0;

struct Part {
  const char* name;
  Shape shape;
  double length, width, x, y;
};

// Component id -> its parts.
using Component = std::vector<Part>;

std::vector<Component> components_ab() {
  return {
      {{"c1", Shape::rectangle, 0.01, 0.01, 0.0065, 0.079}},
      {{"c2", Shape::rectangle, 0.013, 0.013, 0.0195, 0.025}},
      {{"c3", Shape::rectangle, 0.013, 0.013, 0.0271, 0.089}},
      {{"c4", Shape::rectangle, 0.02, 0.02, 0.0397, 0.0552}},
      {{"c5", Shape::rectangle, 0.015, 0.015, 0.0548, 0.0144}},
      {{"c6", Shape::rectangle, 0.01, 0.02, 0.0533, 0.08}},
      {{"c7", Shape::rectangle, 0.02, 0.01, 0.0638, 0.0336}},
      {{"c8", Shape::rectangle, 0.016, 0.016, 0.079, 0.0659}},
      {{"c9", Shape::rectangle, 0.011, 0.011, 0.078, 0.0139}},
      {{"c10", Shape::rectangle, 0.012, 0.012, 0.0805, 0.0921}},
  };
}

std::vector<Component> components_c() {
  return {
      {{"c1", Shape::rectangle, 0.011, 0.02, 0.006, 0.011}},
      {{"c2", Shape::rectangle, 0.008, 0.016, 0.012, 0.072}},
      {{"c3", Shape::rectangle, 0.013, 0.013, 0.016, 0.042}},
      {{"c41", Shape::rectangle, 0.01, 0.01, 0.0297, 0.0191},
       {"c42", Shape::rectangle, 0.005, 0.01, 0.0271, 0.0299},
       {"c43", Shape::rectangle, 0.005, 0.01, 0.0321, 0.0299}},
      {{"c51", Shape::rectangle, 0.01, 0.005, 0.0397, 0.07}, {"c52", Shape::rectangle, 0.01, 0.015, 0.0397, 0.08}},
      {{"c61", Shape::rectangle, 0.01, 0.005, 0.0447, 0.0425},
       {"c62", Shape::rectangle, 0.01, 0.015, 0.0447, 0.0526},
       {"c63", Shape::rectangle, 0.01, 0.02, 0.0548, 0.0501}},
      {{"c71", Shape::rectangle, 0.015, 0.01, 0.0599, 0.0834}, {"c72", Shape::rectangle, 0.005, 0.01, 0.0699, 0.0834}},
      {{"c81", Shape::rectangle, 0.01, 0.02, 0.0649, 0.0249},
       {"c82", Shape::rectangle, 0.01, 0.01, 0.0749, 0.0199},
       {"c83", Shape::rectangle, 0.01, 0.01, 0.0749, 0.0299}},
      {{"c9", Shape::rectangle, 0.023, 0.02, 0.072, 0.062}},
      {{"c10", Shape::rectangle, 0.01, 0.03, 0.089, 0.027}},
  };
}

std::vector<Component> components_d() {
  return {
      {{"c1", Shape::rectangle, 0.0172, 0.0186, 0.0856, 0.0853}},
      {{"c2", Shape::rectangle, 0.0227, 0.0173, 0.0797, 0.046}},
      {{"c3", Shape::rectangle, 0.0154, 0.016, 0.0333, 0.0343}},
      {{"c4", Shape::rectangle, 0.0215, 0.0155, 0.0172, 0.0721}},
      {{"c5", Shape::circle, 0.0164, 0.0164, 0.0166, 0.0186}},
      {{"c6", Shape::circle, 0.0158, 0.0158, 0.0479, 0.0858}},
      {{"c7", Shape::circle, 0.0205, 0.0205, 0.0487, 0.0566}},
      {{"c8", Shape::circle, 0.0198, 0.0198, 0.0821, 0.0226}},
      {{"c9", Shape::capsule, 0.01, 0.0195, 0.0152, 0.0509}},
      {{"c10", Shape::capsule, 0.011, 0.0258, 0.0518, 0.0164}},
      {{"c11", Shape::capsule, 0.026, 0.0091, 0.0804, 0.0630}},
      {{"c12", Shape::capsule, 0.0174, 0.008, 0.0196, 0.0889}},
  };
}

HeatSource to_source(const Part& p) {
  HeatSource s;
  s.name = p.name;
  s.shape = p.shape;
  s.length = p.length;
  s.width = p.width;
  s.center = {p.x, p.y};
  return s;
}

class Placer {
 public:
  explicit Placer(const Grid& grid) : grid_(grid) {}

  // Claims the free cell nearest to `want` (ties by row, then col) that
  // satisfies `ok`; falls back to any free cell when none does.
  void claim(Cell want, const std::function<bool(Cell)>& ok) {
    if (!try_claim(want, ok) && !try_claim(want, [](Cell) { return true; }))
      throw SpecError("preset: grid too small for the sensor layout");
  }

  Cell at(Point p) const {
    const double d = grid_.cell_size();
    const int n = grid_.n_cells();
    return {std::clamp(static_cast<int>(p.y / d), 0, n - 1), std::clamp(static_cast<int>(p.x / d), 0, n - 1)};
  }

  bool taken(Cell c) const { return taken_.count(c) > 0; }
  const std::vector<Cell>& cells() const { return order_; }
  void take(Cell c) {
    taken_.insert(c);
    order_.push_back(c);
  }

 private:
  bool try_claim(Cell want, const std::function<bool(Cell)>& ok) {
    const int n = grid_.n_cells();
    long best_d = std::numeric_limits<long>::max();
    Cell best{-1, -1};
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const Cell cell{r, c};
        if (taken(cell) || !ok(cell)) continue;
        const long dr = r - want.row, dc = c - want.col;
        const long d = dr * dr + dc * dc;
        if (d < best_d) {
          best_d = d;
          best = cell;
        }
      }
    if (best.row < 0) return false;
    take(best);
    return true;
  }

  const Grid& grid_;
  std::set<Cell> taken_;
  std::vector<Cell> order_;
};

// Offsets, as fractions of the part's extents, of the on-component sensors.
std::vector<Point> pattern(std::size_t count) {
  const double a = 1.0 / 3.0, q = 0.25;
  switch (count) {
    case 9: {
      std::vector<Point> v;
      for (double fy : {-a, 0.0, a})
        for (double fx : {-a, 0.0, a}) v.push_back({fx, fy});
      return v;
    }
    case 4:
      return {{-q, -q}, {q, -q}, {-q, q}, {q, q}};
    case 5:
      return {{-q, -q}, {q, -q}, {0.0, 0.0}, {-q, q}, {q, q}};
  }
  throw SpecError("preset: unsupported sensor pattern");
}

SystemSpec build(const std::vector<Component>& comps, Edge sink_edge, std::size_t n_between, int n_cells) {
  SystemSpec spec;
  spec.grid = Grid(n_cells, kSide);
  spec.boundary = BoundarySpec::single_sink(sink_edge, kSide, kSink, kT0);
  for (const auto& comp : comps)
    for (const auto& p : comp) spec.sources.push_back(to_source(p));
  spec.sensors.fill_value = kT0;
  // Placeholder so the spec validates; masks do not depend on the sensors.
  spec.sensors.positions = {Cell{0, 0}};

  const Grid& g = spec.grid;
  const int n = g.n_cells();
  const Masks masks = rasterize_masks(spec);
  Placer placer(g);

  // Near the boundary: 4 per edge, one cell in from it.
  for (int k = 0; k < 4; ++k) {
    const int t = std::clamp(static_cast<int>((k + 0.5) / 4.0 * n), 1, n - 2);
    for (Cell c : {Cell{1, t}, Cell{t, n - 2}, Cell{n - 2, n - 1 - t}, Cell{n - 1 - t, 1}})
      placer.claim(c, [&](Cell x) { return !g.on_ring(x); });
  }

  // On the components.
  for (const auto& comp : comps) {
    const std::size_t per_part = comp.size() == 1 ? 9 : comp.size() == 2 ? 5 : 4;
    for (const auto& p : comp) {
      const HeatSource src = to_source(p);
      for (const Point& f : pattern(per_part)) {
        const Point want{p.x + f.x * p.length, p.y + f.y * p.width};
        placer.claim(placer.at(want), [&](Cell x) { return src.contains(g.center(x)); });
      }
    }
  }

  // Between the components: farthest-point sampling over free interior cells
  // away from the boundary.
  for (std::size_t k = 0; k < n_between; ++k) {
    long best_score = -1;
    Cell best{-1, -1};
    for (int r = 2; r < n - 2; ++r)
      for (int c = 2; c < n - 2; ++c) {
        const Cell cell{r, c};
        if (!masks.omega_e(r, c) || placer.taken(cell)) continue;
        long score = std::numeric_limits<long>::max();
        for (const Cell& s : placer.cells()) {
          const long dr = s.row - r, dc = s.col - c;
          score = std::min(score, dr * dr + dc * dc);
        }
        if (score > best_score) {
          best_score = score;
          best = cell;
        }
      }
    if (best.row < 0) throw SpecError("preset: no free cell between components");
    placer.take(best);
  }

  spec.sensors.positions = placer.cells();
  spec.validate();
  return spec;
}

}  // namespace

std::vector<std::string> preset_names() { return {"a", "b", "c", "d"}; }

SystemSpec preset_spec(const std::string& name, int n_cells) {
  if (n_cells < 16) throw SpecError("preset: need at least 16 cells per side");
  if (name == "a") return build(components_ab(), Edge::top, 18, n_cells);
  if (name == "b") return build(components_ab(), Edge::bottom, 18, n_cells);
  if (name == "c") return build(components_c(), Edge::left, 16, n_cells);
  if (name == "d") return build(components_d(), Edge::right, 18, n_cells);
  throw SpecError("unknown preset '" + name + "' (expected a, b, c or d)");
}

}  // namespace tfrhss
