#include "tfrhss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tfrhss {

namespace {

constexpr double kGeomTol = 1e-12;

std::string fmt_double(double v) { return std::to_string(v); }

}  // namespace

void require_finite(const Field& field, const char* what) {
  for (double v : field.values()) {
    if (!std::isfinite(v)) throw ShapeError(std::string(what) + ": non-finite entry");
  }
}

Grid::Grid(int n_cells, double side_length) : n_cells_(n_cells), side_length_(side_length) {
  if (n_cells < 4) throw SpecError("grid: n_cells must be >= 4");
  if (!(side_length > 0.0) || !std::isfinite(side_length)) throw SpecError("grid: side_length must be > 0");
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::rectangle: return "rectangle";
    case Shape::circle: return "circle";
    case Shape::capsule: return "capsule";
  }
  return "?";
}

Shape shape_from_string(const std::string& s) {
  if (s == "rectangle") return Shape::rectangle;
  if (s == "circle") return Shape::circle;
  if (s == "capsule") return Shape::capsule;
  throw SpecError("unknown shape '" + s + "'");
}

bool HeatSource::contains(Point p) const {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  switch (shape) {
    case Shape::rectangle:
      return std::abs(dx) <= 0.5 * length && std::abs(dy) <= 0.5 * width;
    case Shape::circle: {
      const double r = 0.5 * length;
      return dx * dx + dy * dy <= r * r;
    }
    case Shape::capsule: {
      // distance to the core segment along the longer axis
      const bool along_x = length >= width;
      const double r = 0.5 * std::min(length, width);
      const double half_core = 0.5 * std::max(length, width) - r;
      double a = along_x ? dx : dy;
      const double b = along_x ? dy : dx;
      a = std::max(0.0, std::abs(a) - half_core);
      return a * a + b * b <= r * r;
    }
  }
  return false;
}

void HeatSource::validate(double side_length) const {
  if (!(length > 0.0) || !(width > 0.0)) throw SpecError("source " + name + ": extent must be positive");
  if (shape == Shape::circle && std::abs(length - width) > kGeomTol)
    throw SpecError("source " + name + ": circle needs length == width");
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw SpecError("source " + name + ": intensity must be >= 0");
  const double x0 = center.x - 0.5 * length, x1 = center.x + 0.5 * length;
  const double y0 = center.y - 0.5 * width, y1 = center.y + 0.5 * width;
  if (x0 < -kGeomTol || y0 < -kGeomTol || x1 > side_length + kGeomTol || y1 > side_length + kGeomTol)
    throw SpecError("source " + name + ": shape leaves the domain");
}

const char* to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::dirichlet: return "dirichlet";
    case BoundaryKind::neumann: return "neumann";
    case BoundaryKind::robin: return "robin";
  }
  return "?";
}

const char* to_string(Edge e) {
  switch (e) {
    case Edge::bottom: return "bottom";
    case Edge::right: return "right";
    case Edge::top: return "top";
    case Edge::left: return "left";
  }
  return "?";
}

Edge edge_from_string(const std::string& s) {
  if (s == "bottom") return Edge::bottom;
  if (s == "right") return Edge::right;
  if (s == "top") return Edge::top;
  if (s == "left") return Edge::left;
  throw SpecError("unknown edge '" + s + "'");
}

BoundarySpec BoundarySpec::single_sink(Edge sink_edge, double side_length, double sink_length, double t0) {
  BoundarySpec b;
  b.sink_length = sink_length;
  for (int e = 0; e < 4; ++e) {
    auto& segs = b.edges[e];
    if (static_cast<Edge>(e) != sink_edge) {
      segs.push_back({BoundaryKind::neumann, 0.0, side_length, 0.0, 0.0});
      continue;
    }
    const double a = 0.5 * (side_length - sink_length);
    const double c = 0.5 * (side_length + sink_length);
    segs.push_back({BoundaryKind::neumann, 0.0, a, 0.0, 0.0});
    segs.push_back({BoundaryKind::dirichlet, a, c, t0, 0.0});
    segs.push_back({BoundaryKind::neumann, c, side_length, 0.0, 0.0});
  }
  return b;
}

BoundarySpec BoundarySpec::uniform(double side_length, BoundaryKind kind, double t0) {
  BoundarySpec b;
  b.sink_length = kind == BoundaryKind::dirichlet ? side_length : 0.0;
  for (auto& segs : b.edges) segs.push_back({kind, 0.0, side_length, t0, 0.0});
  return b;
}

bool BoundarySpec::has_dirichlet() const {
  for (const auto& segs : edges)
    for (const auto& s : segs)
      if (s.kind == BoundaryKind::dirichlet) return true;
  return false;
}

void BoundarySpec::validate(double side_length, bool require_dirichlet) const {
  for (int e = 0; e < 4; ++e) {
    const auto& segs = edges[e];
    const std::string name = to_string(static_cast<Edge>(e));
    if (segs.empty()) throw SpecError("boundary " + name + ": no segments");
    double cursor = 0.0;
    for (const auto& s : segs) {
      if (!(s.end > s.start)) throw SpecError("boundary " + name + ": empty or reversed segment");
      if (std::abs(s.start - cursor) > kGeomTol * std::max(1.0, side_length))
        throw SpecError("boundary " + name + ": segments leave a gap or overlap at " + fmt_double(cursor));
      cursor = s.end;
      if (s.kind != BoundaryKind::neumann && !std::isfinite(s.temperature))
        throw SpecError("boundary " + name + ": non-finite temperature");
    }
    if (std::abs(cursor - side_length) > kGeomTol * std::max(1.0, side_length))
      throw SpecError("boundary " + name + ": segments do not reach the end of the edge");
  }
  if (require_dirichlet && !has_dirichlet()) throw SpecError("boundary: at least one dirichlet segment is required");
}

void SensorLayout::validate(int n_cells) const {
  if (positions.empty()) throw SpecError("sensors: at least one sensor is required");
  std::set<Cell> seen;
  for (const auto& c : positions) {
    if (c.row < 0 || c.col < 0 || c.row >= n_cells || c.col >= n_cells)
      throw SpecError("sensors: index (" + std::to_string(c.row) + "," + std::to_string(c.col) + ") out of range");
    if (!seen.insert(c).second)
      throw SpecError("sensors: duplicate index (" + std::to_string(c.row) + "," + std::to_string(c.col) + ")");
  }
  if (!std::isfinite(fill_value)) throw SpecError("sensors: fill_value must be finite");
}

void SystemSpec::validate(bool require_dirichlet) const {
  if (!(conductivity > 0.0)) throw SpecError("conductivity must be > 0");
  for (const auto& s : sources) s.validate(grid.side_length());
  boundary.validate(grid.side_length(), require_dirichlet);
  sensors.validate(grid.n_cells());
}

SystemSpec SystemSpec::with_intensities(const std::vector<double>& intensities) const {
  if (intensities.size() != sources.size()) throw SpecError("with_intensities: one intensity per source required");
  SystemSpec out = *this;
  for (std::size_t i = 0; i < sources.size(); ++i) out.sources[i].intensity = intensities[i];
  return out;
}

namespace {

// Segment of `edge` covering coordinate t, preferring a dirichlet segment when
// t sits exactly on a shared endpoint.
const BoundarySegment* segment_at(const std::vector<BoundarySegment>& segs, double t) {
  const BoundarySegment* hit = nullptr;
  for (const auto& s : segs) {
    if (t >= s.start && t <= s.end) {
      if (!hit || s.kind == BoundaryKind::dirichlet) hit = &s;
    }
  }
  return hit;
}

}  // namespace

Masks rasterize_masks(const SystemSpec& spec) {
  spec.validate(false);
  const Grid& g = spec.grid;
  const int n = g.n_cells();
  Masks m{Mask(n, 0), Mask(n, 0), Mask(n, 0), Field(n, 0.0), {}, {}};

  for (const auto& segs : spec.boundary.edges)
    for (const auto& s : segs)
      if (s.kind == BoundaryKind::robin) throw SpecError("robin boundary segments are not supported");

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell cell{r, c};
      if (!g.on_ring(cell)) continue;
      m.omega_b.push_back(cell);
      const Point p = g.center(cell);
      const std::pair<Edge, double> sides[] = {
          {Edge::bottom, p.x}, {Edge::right, p.y}, {Edge::top, p.x}, {Edge::left, p.y}};
      const bool on[] = {r == 0, c == n - 1, r == n - 1, c == 0};
      for (int k = 0; k < 4; ++k) {
        if (!on[k]) continue;
        const BoundarySegment* seg = segment_at(spec.boundary.edge(sides[k].first), sides[k].second);
        if (seg && seg->kind == BoundaryKind::dirichlet) {
          m.dirichlet(r, c) = 1;
          m.dirichlet_value(r, c) = seg->temperature;
          m.omega_b_dirichlet.push_back(cell);
          break;
        }
      }
    }
  }

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (m.dirichlet(r, c)) continue;
      const Point p = g.center({r, c});
      const bool covered = std::any_of(spec.sources.begin(), spec.sources.end(),
                                       [&](const HeatSource& s) { return s.contains(p); });
      (covered ? m.omega_l : m.omega_e)(r, c) = 1;
    }
  }
  return m;
}

Field source_field(const SystemSpec& spec) {
  const Grid& g = spec.grid;
  const int n = g.n_cells();
  const Masks masks = rasterize_masks(spec);
  Field phi(n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!masks.omega_l(r, c)) continue;
      const Point p = g.center({r, c});
      for (const auto& s : spec.sources)
        if (s.contains(p)) phi(r, c) += s.intensity;
    }
  }
  return phi;
}

Domain::Domain(SystemSpec s) : spec(std::move(s)), masks(rasterize_masks(spec)) {}

}  // namespace tfrhss
