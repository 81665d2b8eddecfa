#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfrhss {

/// Thrown when a domain object violates one of its construction invariants.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when array shapes disagree (field vs. grid, tensor vs. layer, ...).
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square N x N array stored row-major. Row index grows with y (row 0 is the
/// bottom of the board), column index grows with x.
template <typename T>
class Array2D {
 public:
  Array2D() = default;
  explicit Array2D(int n, T fill = T{}) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {
    if (n <= 0) throw ShapeError("Array2D: size must be positive");
  }

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int row, int col) { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const { return data_[index(row, col)]; }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(col);
  }

  bool operator==(const Array2D&) const = default;

 private:
  int n_ = 0;
  std::vector<T> data_;
};

/// Temperature (K) or any other per-cell scalar, 64-bit.
using Field = Array2D<double>;
using Mask = Array2D<std::uint8_t>;

/// Throws ShapeError unless every entry is finite.
void require_finite(const Field& field, const char* what);

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

class Grid {
 public:
  Grid() = default;
  Grid(int n_cells, double side_length);

  int n_cells() const { return n_cells_; }
  double side_length() const { return side_length_; }
  double cell_size() const { return side_length_ / n_cells_; }

  /// Physical coordinates of a cell centre.
  Point center(Cell c) const {
    return {(c.col + 0.5) * cell_size(), (c.row + 0.5) * cell_size()};
  }
  bool contains(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < n_cells_ && c.col < n_cells_;
  }
  bool on_ring(Cell c) const {
    return c.row == 0 || c.col == 0 || c.row == n_cells_ - 1 || c.col == n_cells_ - 1;
  }

  bool operator==(const Grid&) const = default;

 private:
  int n_cells_ = 4;
  double side_length_ = 1.0;
};

enum class Shape { rectangle, circle, capsule };

const char* to_string(Shape s);
Shape shape_from_string(const std::string& s);

/// A uniformly heated component. `length` is the x extent and `width` the y
/// extent; for circles both must equal the diameter. A capsule is an
/// axis-aligned stadium whose semicircular caps sit on the longer axis.
struct HeatSource {
  std::string name;
  Shape shape = Shape::rectangle;
  Point center;
  double length = 0.0;
  double width = 0.0;
  double intensity = 0.0;  // W/m^2

  bool contains(Point p) const;
  void validate(double side_length) const;
};

enum class BoundaryKind { dirichlet, neumann, robin };

const char* to_string(BoundaryKind k);

struct BoundarySegment {
  BoundaryKind kind = BoundaryKind::neumann;
  double start = 0.0;  // metres along the edge, measured from the origin side
  double end = 0.0;
  double temperature = 0.0;  // T0 for dirichlet/robin
  double heat_transfer = 0.0;  // h for robin; never used by the solver
};

enum class Edge { bottom = 0, right = 1, top = 2, left = 3 };

const char* to_string(Edge e);
Edge edge_from_string(const std::string& s);

struct BoundarySpec {
  std::array<std::vector<BoundarySegment>, 4> edges;
  double sink_length = 0.0;

  std::vector<BoundarySegment>& edge(Edge e) { return edges[static_cast<int>(e)]; }
  const std::vector<BoundarySegment>& edge(Edge e) const { return edges[static_cast<int>(e)]; }

  /// Whole boundary adiabatic except one Dirichlet patch of `sink_length`
  /// centred on `sink_edge`.
  static BoundarySpec single_sink(Edge sink_edge, double side_length, double sink_length, double t0);
  /// Every edge a single segment of the given kind.
  static BoundarySpec uniform(double side_length, BoundaryKind kind, double t0);

  bool has_dirichlet() const;
  /// Segments must partition every edge. Without a Dirichlet segment the
  /// steady problem is singular, so that is rejected unless explicitly allowed.
  void validate(double side_length, bool require_dirichlet = true) const;
};

struct SensorLayout {
  std::vector<Cell> positions;  // (row, col)
  double fill_value = 298.0;

  void validate(int n_cells) const;
};

struct SystemSpec {
  Grid grid;
  std::vector<HeatSource> sources;
  BoundarySpec boundary;
  SensorLayout sensors;
  double conductivity = 1.0;

  void validate(bool require_dirichlet = true) const;
  /// Copy with source intensities replaced, in declaration order.
  SystemSpec with_intensities(const std::vector<double>& intensities) const;
};

/// Cell sets derived from a SystemSpec. "Interior" means every cell that is
/// not a Dirichlet cell; omega_l and omega_e partition it.
struct Masks {
  Mask omega_l;
  Mask omega_e;
  Mask dirichlet;
  Field dirichlet_value;  // T0 on Dirichlet cells, 0 elsewhere
  std::vector<Cell> omega_b_dirichlet;
  std::vector<Cell> omega_b;
};

Masks rasterize_masks(const SystemSpec& spec);

/// Sum of intensities of every source covering each cell centre (W/m^2).
Field source_field(const SystemSpec& spec);

/// SystemSpec together with its rasterized masks; the form most modules consume.
struct Domain {
  SystemSpec spec;
  Masks masks;

  explicit Domain(SystemSpec s);
  const Grid& grid() const { return spec.grid; }
  int n() const { return spec.grid.n_cells(); }
};

}  // namespace tfrhss
