#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfrhss/grid.hpp"
#include "tfrhss/nn/params.hpp"
#include "tfrhss/nn/tape.hpp"

namespace tfrhss {

enum class FlipMode { main, anti, off };

FlipMode parse_flip_mode(const std::string& s);
std::string to_string(FlipMode m);

/// Spatial transpose of every (batch, channel) plane. main: out[i][j] =
/// in[j][i]; anti: out[i][j] = in[N-1-j][N-1-i]; off: copy. Both flips are
/// involutions and self-adjoint.
nn::Tensor4 diagonal_flip(const nn::Tensor4& x, FlipMode mode = FlipMode::main);

struct ModelConfig {
  int n_cells = 64;
  std::vector<int> widths{16, 32, 64};  // encoder widths; decoder mirrors them
  FlipMode flip = FlipMode::main;
  bool single_net = false;  // vanilla encoder-decoder without Net2
  double t0 = 298.0;
  double scale = 50.0;

  int pooling_factor() const { return 1 << widths.size(); }
  void validate() const;
  /// Single-line key=value text stored in checkpoint headers.
  std::string descriptor() const;
  static ModelConfig parse_descriptor(const std::string& text);
};

class ReversibleNet {
 public:
  /// Fresh He-uniform weights, zero biases.
  ReversibleNet(const ModelConfig& config, std::uint64_t seed);
  /// Adopts existing parameters; names and dims must match the config.
  ReversibleNet(const ModelConfig& config, nn::ParamStore params);

  const ModelConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// Records the forward pass of a (B, 1, N, N) batch of monitoring matrices
  /// in kelvin and returns the output node (kelvin). Parameter gradients are
  /// accumulated into `grads` on backward when it is non-null; it must have
  /// this net's structure (see ParamStore::clone).
  nn::Tape::Id record(nn::Tape& tape, const nn::Tensor4& input, nn::ParamStore* grads) const;

  Field predict(const Field& monitoring) const;

  void save(const std::string& path) const;
  static ReversibleNet load(const std::string& path);

 private:
  nn::Tape::Id record_subnet(nn::Tape& tape, nn::Tape::Id x, const std::string& prefix, nn::ParamStore* grads) const;
  void check_params() const;

  ModelConfig config_;
  nn::ParamStore params_;
};

/// Expected parameter layout for a config, in order: per subnet enc{i}.w/b,
/// dec{i}.w/b, out.w/b, prefixed "net1." / "net2.".
nn::ParamStore make_param_layout(const ModelConfig& config);

}  // namespace tfrhss
