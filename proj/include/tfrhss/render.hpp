#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfrhss/grid.hpp"

namespace tfrhss {

enum class Colormap { gray, jet };

Colormap parse_colormap(const std::string& s);

/// 256-entry RGB table. gray: (k, k, k). jet: channel c of entry k is
/// round(255 * clamp(1.5 - |4t - o_c|, 0, 1)) with t = k / 255 and offsets
/// o = (3, 2, 1) for (r, g, b).
const std::vector<std::array<std::uint8_t, 3>>& colormap_lut(Colormap map);

struct RenderOptions {
  int size = 0;  // output pixels per side; 0 uses one pixel per cell
  std::optional<double> min;  // colour range; defaults to the field's range
  std::optional<double> max;
  Colormap colormap = Colormap::jet;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first
};

/// Nearest-cell sampling with the top image row showing the top of the board.
/// Values are mapped to lut index floor(255 * (v - min) / (max - min)), clamped;
/// a degenerate range maps everything to index 0.
Image render_field(const Field& field, const RenderOptions& options);

/// |pred - truth| per cell.
Field abs_error(const Field& pred, const Field& truth);

/// Binary P6 with maxval 255.
std::string encode_ppm(const Image& image);
void write_ppm(const Image& image, const std::string& path);

}  // namespace tfrhss
