#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "support.hpp"
#include "tfrhss/config.hpp"
#include "tfrhss/datagen.hpp"
#include "tfrhss/presets.hpp"

using namespace tfrhss;
using namespace testsupport;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tfrhss_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::shared_ptr<const SensorLayout> layout_of(std::vector<Cell> cells, double fill = 298.0) {
  auto l = std::make_shared<SensorLayout>();
  l->positions = std::move(cells);
  l->fill_value = fill;
  return l;
}

}  // namespace

TEST_CASE("sample_intensities") {
  const SystemSpec spec = preset_spec("a", 16);
  const auto fixed = sample_intensities(spec, 1, 10000.0, 10000.0);
  CHECK(fixed.size() == 10);
  for (double v : fixed) CHECK(v == 10000.0);
  const auto a = sample_intensities(spec, 42, 0.0, 30000.0);
  for (double v : a) {
    CHECK(v >= 0.0);
    CHECK(v <= 30000.0);
  }
  CHECK(a == sample_intensities(spec, 42, 0.0, 30000.0));
  CHECK(a != sample_intensities(spec, 43, 0.0, 30000.0));
  CHECK_THROWS_AS(sample_intensities(spec, 1, 5.0, 1.0), SpecError);
}

TEST_CASE("make_monitoring") {
  const Field truth(8, 320.0);
  const MonitoringInput m = make_monitoring(truth, layout_of({{1, 1}, {2, 5}, {7, 0}}));
  int differing = 0;
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    if (m.values[k] == 320.0) ++differing;
    else CHECK(m.values[k] == 298.0);
  }
  CHECK(differing == 3);
  // A reading equal to the fill is only told apart by the layout.
  const MonitoringInput same = make_monitoring(Field(8, 298.0), layout_of({{1, 1}}));
  CHECK(same.values == Field(8, 298.0));
  CHECK(same.layout->positions.size() == 1);
  CHECK_THROWS_AS(make_monitoring(truth, layout_of({{8, 1}})), SpecError);
}

TEST_CASE("data A monitoring differs from the fill at 124 cells") {
  const SystemSpec spec = preset_spec("a", 64);
  GenerateOptions opt;
  opt.count = 1;
  opt.seed = 9;
  const Dataset ds = generate_dataset(spec, opt);
  const Sample& s = ds.samples[0];
  int differing = 0;
  for (std::size_t k = 0; k < s.monitoring.values.size(); ++k) differing += s.monitoring.values[k] != 298.0;
  CHECK(differing == 124);
  for (const Cell& c : spec.sensors.positions) CHECK(s.monitoring.values(c.row, c.col) == (*s.truth)(c.row, c.col));
}

TEST_CASE("add_noise") {
  const auto layout = layout_of({{0, 0}, {3, 3}});
  MonitoringInput m = make_monitoring(Field(6, 320.0), layout);
  CHECK(add_noise(m, 0.0, 1).values == m.values);
  const MonitoringInput noisy = add_noise(m, 1e-2, 7);
  CHECK(noisy.values(0, 0) != 320.0);
  CHECK(noisy.values(3, 3) != 320.0);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      if (!(r == c && (r == 0 || r == 3))) CHECK(noisy.values(r, c) == 298.0);
  CHECK(add_noise(m, 1e-2, 7).values == noisy.values);
  CHECK_THROWS_AS(add_noise(m, -1.0, 1), SpecError);
}

TEST_CASE("noise has the requested relative standard deviation") {
  // About 10^5 draws: a sensor on every cell of a 317 x 317 grid reading 320 K.
  std::vector<Cell> many;
  for (int r = 0; r < 317; ++r)
    for (int c = 0; c < 317; ++c) many.push_back({r, c});
  const MonitoringInput big = make_monitoring(Field(317, 320.0), layout_of(many));
  const MonitoringInput n = add_noise(big, 1e-2, 99);
  double sq = 0.0;
  for (std::size_t k = 0; k < n.values.size(); ++k) sq += std::pow((n.values[k] - 320.0) / 320.0, 2);
  CHECK(std::abs(std::sqrt(sq / static_cast<double>(n.values.size())) - 1e-2) < 2e-4);
}

TEST_CASE("generate_dataset is deterministic and thread independent") {
  const SystemSpec spec = preset_spec("c", 32);
  GenerateOptions opt;
  opt.count = 6;
  opt.seed = 123;
  const Dataset one = generate_dataset(spec, opt);
  opt.threads = 3;
  const Dataset three = generate_dataset(spec, opt);
  const std::string p1 = temp_path("det1.tfrd"), p3 = temp_path("det3.tfrd");
  write_dataset(one, p1);
  write_dataset(three, p3);
  CHECK(slurp(p1) == slurp(p3));
  // Sample i depends only on (seed, i).
  opt.count = 2;
  const Dataset prefix = generate_dataset(spec, opt);
  CHECK(prefix.samples[1].truth == one.samples[1].truth);
  std::filesystem::remove(p1);
  std::filesystem::remove(p3);
}

TEST_CASE("dataset round trip is bit exact") {
  const SystemSpec spec = preset_spec("d", 32);
  GenerateOptions opt;
  opt.count = 3;
  opt.seed = 5;
  opt.noise_eta = 1e-2;
  Dataset ds = generate_dataset(spec, opt);
  ds.samples[2].truth.reset();
  const std::string path = temp_path("rt.tfrd");
  write_dataset(ds, path);
  const Dataset back = read_dataset(path, spec.sensors.fill_value);
  REQUIRE(back.size() == 3);
  CHECK(back.n_cells == 32);
  CHECK(back.layout->positions == spec.sensors.positions);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.samples[i].monitoring.values == ds.samples[i].monitoring.values);
    CHECK(back.samples[i].truth == ds.samples[i].truth);
    CHECK(back.samples[i].intensities == ds.samples[i].intensities);
  }
  CHECK_NOTHROW(check_compatible(back, spec));
  CHECK_THROWS_AS(check_compatible(back, preset_spec("a", 32)), FormatError);
  CHECK_THROWS_AS(check_compatible(back, preset_spec("d", 64)), FormatError);

  // Header layout: magic, version, N, count, sensor count.
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 4) == "TFRD");
  auto u32_at = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(b)]);
    return v;
  };
  CHECK(u32_at(4) == 1);
  CHECK(u32_at(8) == 32);
  CHECK(u32_at(12) == 3);
  CHECK(u32_at(16) == spec.sensors.positions.size());
  const std::size_t m = spec.sensors.positions.size();
  const std::size_t per_sample = 2 * 32 * 32 * 4 + 4 + spec.sources.size() * 4;
  CHECK(bytes.size() == 20 + m * 8 + 3 * per_sample);

  SUBCASE("truncated and corrupted files are rejected") {
    std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    CHECK_THROWS_AS(read_dataset(path, 298.0), FormatError);
    std::string bad = bytes;
    bad[0] = 'X';
    std::ofstream(path, std::ios::binary) << bad;
    CHECK_THROWS_AS(read_dataset(path, 298.0), FormatError);
    std::ofstream(path, std::ios::binary) << bytes << "extra";
    CHECK_THROWS_AS(read_dataset(path, 298.0), FormatError);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_dataset(temp_path("missing.tfrd"), 298.0), FormatError);
}

TEST_CASE("fields file round trip") {
  std::mt19937_64 rng(1);
  std::vector<Field> fields{quantize_f32(random_field(8, rng)), quantize_f32(random_field(8, rng))};
  const std::string path = temp_path("f.tfrf");
  write_fields(fields, path);
  CHECK(read_fields(path) == fields);
  std::filesystem::remove(path);
}

TEST_CASE("noise only touches sensors and generation reports failing samples") {
  const SystemSpec spec = preset_spec("a", 16);
  GenerateOptions opt;
  opt.count = 2;
  opt.noise_eta = 0.05;
  const Dataset ds = generate_dataset(spec, opt);
  std::vector<std::uint8_t> is_sensor(16 * 16, 0);
  for (const Cell& c : spec.sensors.positions) is_sensor[static_cast<std::size_t>(c.row * 16 + c.col)] = 1;
  for (const auto& s : ds.samples)
    for (std::size_t k = 0; k < s.monitoring.values.size(); ++k)
      if (!is_sensor[k]) CHECK(s.monitoring.values[k] == 298.0);

  opt.solver.max_iterations = 2;
  opt.count = 3;
  try {
    generate_dataset(spec, opt);
    FAIL("expected SampleNonConvergence");
  } catch (const SampleNonConvergence& e) {
    CHECK(e.sample_index == 0);
  }
}

TEST_CASE("manifest text") {
  Manifest m;
  m.set("command", std::string("generate"));
  m.set("seed", std::uint64_t{7});
  m.set("tolerance", 1e-6);
  m.set("seed", std::uint64_t{8});
  CHECK(m.to_text() == "command = generate\nseed = 8\ntolerance = 1e-06\n");
  const std::string path = temp_path("m.manifest");
  m.write(path);
  const Manifest back = Manifest::read(path);
  CHECK(back.get("tolerance").value() == "1e-06");
  CHECK_FALSE(back.get("absent").has_value());
  std::filesystem::remove(path);
}
