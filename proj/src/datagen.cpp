#include "tfrhss/datagen.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "tfrhss/binary_io.hpp"
#include "tfrhss/config.hpp"
#include "tfrhss/parallel.hpp"

namespace tfrhss {

using io::Reader;
using io::Writer;

namespace {

constexpr char kDatasetMagic[4] = {'T', 'F', 'R', 'D'};
constexpr char kFieldsMagic[4] = {'T', 'F', 'R', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

constexpr std::uint64_t kStreamIntensity = 1;
constexpr std::uint64_t kStreamNoise = 2;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ splitmix64(index)) + stream);
}

std::vector<double> sample_intensities(const SystemSpec& spec, std::uint64_t rng_seed, double low, double high) {
  if (!(low >= 0.0 && high >= low)) throw SpecError("sample_intensities: need 0 <= low <= high");
  std::mt19937_64 rng(rng_seed);
  std::vector<double> out(spec.sources.size());
  if (low == high) {
    std::fill(out.begin(), out.end(), low);
    return out;
  }
  std::uniform_real_distribution<double> dist(low, high);
  for (auto& v : out) v = dist(rng);
  return out;
}

MonitoringInput make_monitoring(const Field& truth, std::shared_ptr<const SensorLayout> layout) {
  if (!layout) throw ShapeError("make_monitoring: layout required");
  layout->validate(truth.n());
  MonitoringInput m{Field(truth.n(), layout->fill_value), layout};
  for (const auto& s : layout->positions) m.values(s.row, s.col) = truth(s.row, s.col);
  return m;
}

MonitoringInput add_noise(const MonitoringInput& monitoring, double eta, std::uint64_t rng_seed) {
  if (!(eta >= 0.0)) throw SpecError("add_noise: eta must be >= 0");
  MonitoringInput out = monitoring;
  if (eta == 0.0) return out;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& s : monitoring.layout->positions) {
    double& v = out.values(s.row, s.col);
    v = v * (1.0 + eta * gauss(rng));
  }
  return out;
}

Field quantize_f32(const Field& f) {
  Field out = f;
  for (auto& v : out.values()) v = static_cast<float>(v);
  return out;
}

Dataset generate_dataset(const SystemSpec& spec, const GenerateOptions& options) {
  if (options.count < 1) throw SpecError("generate_dataset: count must be >= 1");
  spec.validate();
  auto layout = std::make_shared<const SensorLayout>(spec.sensors);
  Dataset ds;
  ds.n_cells = spec.grid.n_cells();
  ds.layout = layout;
  ds.samples.resize(options.count);

  auto work = [&](std::size_t i) {
    try {
      Sample& s = ds.samples[i];
      s.intensities = sample_intensities(spec, stream_seed(options.seed, i, kStreamIntensity),
                                         options.intensity_low, options.intensity_high);
      // stored as f32, so solve with exactly what the file will hold
      for (auto& v : s.intensities) v = static_cast<float>(v);
      const Field truth = quantize_f32(solve(spec.with_intensities(s.intensities), options.solver));
      s.monitoring = make_monitoring(truth, layout);
      if (options.noise_eta > 0.0) {
        s.monitoring = add_noise(s.monitoring, options.noise_eta, stream_seed(options.seed, i, kStreamNoise));
        s.monitoring.values = quantize_f32(s.monitoring.values);
      }
      s.truth = truth;
    } catch (const NonConvergence& e) {
      throw SampleNonConvergence(i, e);
    }
  };
  parallel_for(options.count, options.threads, work);
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  if (!dataset.layout) throw FormatError("write_dataset: dataset has no layout");
  const int n = dataset.n_cells;
  Writer w(path);
  w.bytes(kDatasetMagic, 4);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(dataset.samples.size()));
  w.u32(static_cast<std::uint32_t>(dataset.layout->positions.size()));
  for (const auto& c : dataset.layout->positions) {
    w.u32(static_cast<std::uint32_t>(c.row));
    w.u32(static_cast<std::uint32_t>(c.col));
  }
  for (const auto& s : dataset.samples) {
    if (s.monitoring.values.n() != n) throw FormatError("write_dataset: sample grid mismatch");
    w.field(s.monitoring.values);
    if (s.truth) {
      if (s.truth->n() != n) throw FormatError("write_dataset: truth grid mismatch");
      w.field(*s.truth);
    } else {
      w.nan_field(static_cast<std::size_t>(n) * n);
    }
    w.u32(static_cast<std::uint32_t>(s.intensities.size()));
    for (double v : s.intensities) w.f32(static_cast<float>(v));
  }
  w.finish(path);
}

Dataset read_dataset(const std::string& path, double fill_value) {
  Reader r(path);
  r.expect_magic(kDatasetMagic);
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) throw FormatError("'" + path + "': unsupported version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  const std::uint32_t count = r.u32();
  const std::uint32_t m = r.u32();
  if (n < 4 || n > 16384) throw FormatError("'" + path + "': implausible grid size");
  auto layout = std::make_shared<SensorLayout>();
  layout->fill_value = fill_value;
  for (std::uint32_t i = 0; i < m; ++i) {
    const int row = static_cast<int>(r.u32());
    const int col = static_cast<int>(r.u32());
    layout->positions.push_back({row, col});
  }
  try {
    layout->validate(static_cast<int>(n));
  } catch (const SpecError& e) {
    throw FormatError("'" + path + "': " + e.what());
  }

  Dataset ds;
  ds.n_cells = static_cast<int>(n);
  ds.layout = layout;
  ds.samples.resize(count);
  for (auto& s : ds.samples) {
    s.monitoring = {r.field(static_cast<int>(n)), layout};
    Field truth = r.field(static_cast<int>(n));
    if (!std::isnan(truth[0])) s.truth = std::move(truth);
    const std::uint32_t k = r.u32();
    if (k > 1u << 20) throw FormatError("'" + path + "': implausible source count");
    s.intensities.resize(k);
    for (auto& v : s.intensities) v = r.f32();
  }
  r.expect_eof();
  return ds;
}

void check_compatible(const Dataset& dataset, const SystemSpec& spec) {
  if (dataset.n_cells != spec.grid.n_cells())
    throw FormatError("dataset grid " + std::to_string(dataset.n_cells) + " does not match spec grid " +
                      std::to_string(spec.grid.n_cells()));
  if (!dataset.layout || dataset.layout->positions != spec.sensors.positions)
    throw FormatError("dataset sensor layout does not match the spec");
}

void write_fields(const std::vector<Field>& fields, const std::string& path) {
  if (fields.empty()) throw FormatError("write_fields: nothing to write");
  const int n = fields.front().n();
  Writer w(path);
  w.bytes(kFieldsMagic, 4);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    if (f.n() != n) throw FormatError("write_fields: mixed grid sizes");
    w.field(f);
  }
  w.finish(path);
}

std::vector<Field> read_fields(const std::string& path) {
  Reader r(path);
  r.expect_magic(kFieldsMagic);
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) throw FormatError("'" + path + "': unsupported version " + std::to_string(version));
  const std::uint32_t n = r.u32();
  const std::uint32_t count = r.u32();
  if (n < 1 || n > 16384) throw FormatError("'" + path + "': implausible grid size");
  std::vector<Field> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(r.field(static_cast<int>(n)));
  r.expect_eof();
  return out;
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

std::string Manifest::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write manifest '" + path + "'");
  out << to_text();
}

Manifest Manifest::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest '" + path + "'");
  Manifest m;
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    m.entries_.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return m;
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

}  // namespace tfrhss
