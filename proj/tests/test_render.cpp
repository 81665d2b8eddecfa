#include <doctest.h>

#include <cstdlib>

#include "support.hpp"
#include "tfrhss/parallel.hpp"
#include "tfrhss/render.hpp"

using namespace tfrhss;
using namespace testsupport;

TEST_CASE("colormap tables") {
  const auto& gray = colormap_lut(Colormap::gray);
  REQUIRE(gray.size() == 256);
  CHECK(gray[0] == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(gray[200] == std::array<std::uint8_t, 3>{200, 200, 200});
  const auto& jet = colormap_lut(Colormap::jet);
  REQUIRE(jet.size() == 256);
  // t = 0: blue channel at 1.5 - 1 = 0.5; t = 1: red channel at 1.5 - 1 = 0.5.
  CHECK(jet[0] == std::array<std::uint8_t, 3>{0, 0, 128});
  CHECK(jet[255] == std::array<std::uint8_t, 3>{128, 0, 0});
  // t = 0.5 sits at the green peak with red and blue at 1.5 - 1 = 0.5.
  CHECK(jet[128][1] == 255);
  CHECK(parse_colormap("gray") == Colormap::gray);
  CHECK_THROWS(parse_colormap("viridis"));
}

TEST_CASE("constant field renders a single colour at the requested size") {
  RenderOptions o;
  o.size = 50;
  const Image img = render_field(Field(8, 305.0), o);
  CHECK(img.width == 50);
  CHECK(img.height == 50);
  REQUIRE(img.rgb.size() == 50u * 50u * 3u);
  const auto want = colormap_lut(Colormap::jet)[0];
  for (std::size_t k = 0; k < img.rgb.size(); k += 3) {
    CHECK(img.rgb[k] == want[0]);
    CHECK(img.rgb[k + 1] == want[1]);
    CHECK(img.rgb[k + 2] == want[2]);
  }
}

TEST_CASE("orientation and range mapping") {
  Field f(2, 0.0);
  f(1, 0) = 10.0;  // top-left of the board
  RenderOptions o;
  o.colormap = Colormap::gray;
  const Image img = render_field(f, o);
  CHECK(img.width == 2);
  CHECK(img.rgb[0] == 255);  // first pixel is the top-left corner
  CHECK(img.rgb[3] == 0);
  CHECK(img.rgb[6] == 0);
  o.min = 0.0;
  o.max = 20.0;
  CHECK(render_field(f, o).rgb[0] == 127);
  o.max = 5.0;
  CHECK(render_field(f, o).rgb[0] == 255);

  const Field e = abs_error(Field(2, 3.0), f);
  CHECK(e(1, 0) == 7.0);
  CHECK(e(0, 0) == 3.0);
}

TEST_CASE("ppm encoding") {
  Image img;
  img.width = 3;
  img.height = 2;
  img.rgb.assign(18, 7);
  const std::string ppm = encode_ppm(img);
  CHECK(ppm.substr(0, 11) == "P6\n3 2\n255\n");
  CHECK(ppm.size() == 11 + 18);
  CHECK(static_cast<unsigned char>(ppm.back()) == 7);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  ::setenv("TFRHSS_THREADS", "5", 1);
  CHECK(resolve_threads(0) == 5);
  CHECK(resolve_threads(2) == 2);
  ::unsetenv("TFRHSS_THREADS");
  CHECK(resolve_threads(0) == 1);
}

TEST_CASE("parallel_for visits every index and rethrows the lowest failure") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}
