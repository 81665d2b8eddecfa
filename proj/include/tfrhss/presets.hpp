#pragma once

#include <string>
#include <vector>

#include "tfrhss/grid.hpp"

namespace tfrhss {

/// Built-in layouts on a 0.1 m board with a 0.01 m sink held at 298 K:
///   a: 10 rectangles, sink centred on the top edge
///   b: the same components, sink on the bottom edge
///   c: 10 components, 5 of them split into 2 or 3 independently powered parts, sink on the left
///   d: 4 rectangles, 4 circles and 4 capsules, sink on the right
/// Sensors: 16 near the boundary, 18 (16 for c) between components, and 9
/// per component (12 / 10 for the three- / two-part components of c).
/// Intensities are left at 0; datasets draw them per sample.
SystemSpec preset_spec(const std::string& name, int n_cells);

std::vector<std::string> preset_names();

}  // namespace tfrhss
