#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfrhss/binary_io.hpp"
#include "tfrhss/fdm_solver.hpp"
#include "tfrhss/grid.hpp"
#include "tfrhss/pirl_loss.hpp"

namespace tfrhss {

/// Solver failure while generating one sample of a dataset.
class SampleNonConvergence : public NonConvergence {
 public:
  SampleNonConvergence(std::size_t index, const NonConvergence& cause)
      : NonConvergence(cause), sample_index(index) {}
  std::size_t sample_index;
};

struct Sample {
  MonitoringInput monitoring;
  std::optional<Field> truth;  // absent for unlabelled samples
  std::vector<double> intensities;
};

struct Dataset {
  int n_cells = 0;
  std::shared_ptr<const SensorLayout> layout;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
};

/// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);
/// Independent stream for (seed, index, stream) triples.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// One uniform draw per source in [low, high].
std::vector<double> sample_intensities(const SystemSpec& spec, std::uint64_t rng_seed, double low, double high);

MonitoringInput make_monitoring(const Field& truth, std::shared_ptr<const SensorLayout> layout);

/// Each sensor value v becomes v * (1 + eta * g), g standard normal; other
/// cells are untouched.
MonitoringInput add_noise(const MonitoringInput& monitoring, double eta, std::uint64_t rng_seed);

struct GenerateOptions {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  double intensity_low = 0.0;
  double intensity_high = 30000.0;
  double noise_eta = 0.0;
  SolverConfig solver;
  int threads = 1;
};

/// Samples intensities, solves for the truth field and assembles the
/// monitoring matrix for each sample. Sample i only depends on (seed, i).
Dataset generate_dataset(const SystemSpec& spec, const GenerateOptions& options);

/// Little-endian "TFRD" file: u32 version, N, count, sensor count, sensor
/// (row, col) u32 pairs, then per sample monitoring N^2 f32, truth N^2 f32
/// (NaN-filled when absent), u32 source count, f32 intensities.
void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path, double fill_value);

/// Raises FormatError when the dataset grid or sensor layout disagrees with the spec.
void check_compatible(const Dataset& dataset, const SystemSpec& spec);

/// Float32 round trip applied to a field, matching what the file stores.
Field quantize_f32(const Field& f);

/// Little-endian "TFRF" file of predicted fields: u32 version, N, count, then
/// N^2 f32 per field.
void write_fields(const std::vector<Field>& fields, const std::string& path);
std::vector<Field> read_fields(const std::string& path);

/// Plain `key = value` lines, keys in insertion order.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);
  std::string to_text() const;
  void write(const std::string& path) const;
  static Manifest read(const std::string& path);
  std::optional<std::string> get(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace tfrhss
