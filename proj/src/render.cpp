#include "tfrhss/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tfrhss {

Colormap parse_colormap(const std::string& s) {
  if (s == "gray") return Colormap::gray;
  if (s == "jet") return Colormap::jet;
  throw SpecError("unknown colormap '" + s + "' (expected gray or jet)");
}

namespace {

std::vector<std::array<std::uint8_t, 3>> build_lut(Colormap map) {
  std::vector<std::array<std::uint8_t, 3>> lut(256);
  for (int k = 0; k < 256; ++k) {
    if (map == Colormap::gray) {
      const auto v = static_cast<std::uint8_t>(k);
      lut[static_cast<std::size_t>(k)] = {v, v, v};
      continue;
    }
    const double t = k / 255.0;
    auto channel = [t](double offset) {
      const double v = std::clamp(1.5 - std::abs(4.0 * t - offset), 0.0, 1.0);
      return static_cast<std::uint8_t>(std::lround(255.0 * v));
    };
    lut[static_cast<std::size_t>(k)] = {channel(3.0), channel(2.0), channel(1.0)};
  }
  return lut;
}

}  // namespace

const std::vector<std::array<std::uint8_t, 3>>& colormap_lut(Colormap map) {
  static const auto gray = build_lut(Colormap::gray);
  static const auto jet = build_lut(Colormap::jet);
  return map == Colormap::gray ? gray : jet;
}

Image render_field(const Field& field, const RenderOptions& options) {
  require_finite(field, "render");
  const int n = field.n();
  if (options.size < 0) throw SpecError("render: size must be >= 0");
  const auto [lo_it, hi_it] = std::minmax_element(field.values().begin(), field.values().end());
  const double lo = options.min.value_or(*lo_it);
  const double hi = options.max.value_or(*hi_it);
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw SpecError("render: invalid colour range");
  const auto& lut = colormap_lut(options.colormap);

  Image img;
  img.width = img.height = options.size > 0 ? options.size : n;
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  std::size_t o = 0;
  for (int y = 0; y < img.height; ++y) {
    const int row = n - 1 - static_cast<int>(static_cast<long>(y) * n / img.height);
    for (int x = 0; x < img.width; ++x) {
      const int col = static_cast<int>(static_cast<long>(x) * n / img.width);
      int k = 0;
      if (hi > lo) k = std::clamp(static_cast<int>(std::floor(255.0 * (field(row, col) - lo) / (hi - lo))), 0, 255);
      const auto& c = lut[static_cast<std::size_t>(k)];
      img.rgb[o++] = c[0];
      img.rgb[o++] = c[1];
      img.rgb[o++] = c[2];
    }
  }
  return img;
}

Field abs_error(const Field& pred, const Field& truth) {
  if (pred.n() != truth.n()) throw ShapeError("render: prediction and truth sizes differ");
  Field out(pred.n());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(pred[k] - truth[k]);
  return out;
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::string data = encode_ppm(image);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace tfrhss
