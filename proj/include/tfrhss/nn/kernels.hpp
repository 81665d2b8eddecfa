#pragma once

#include <cstdint>
#include <vector>

#include "tfrhss/nn/tensor.hpp"

namespace tfrhss::nn {

enum class PadMode { zero, replicate };

struct ConvOptions {
  int stride = 1;
  int pad = 1;
  PadMode mode = PadMode::replicate;
};

/// Cross-correlation. weight is (out, in, k, k); bias is (1, out, 1, 1) or empty.
Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weight, const Tensor4& bias, const ConvOptions& opt);

struct ConvGrads {
  Tensor4 input;   // empty when not requested
  Tensor4 weight;
  Tensor4 bias;
};

ConvGrads conv2d_backward(const Tensor4& input, const Tensor4& weight, const Tensor4& grad_output,
                          const ConvOptions& opt, bool need_input_grad = true);

/// argmax position (flat index into the input plane) for each pooled cell.
struct PoolIndices {
  Dims input_dims;
  std::vector<std::int32_t> argmax;
};

struct PoolResult {
  Tensor4 output;
  PoolIndices indices;
};

/// 2x2 max pooling with stride 2; ties resolve to the first element in
/// row-major order. Height and width must be even.
PoolResult maxpool2x2_forward(const Tensor4& input);
Tensor4 maxpool2x2_backward(const Tensor4& grad_output, const PoolIndices& indices);

/// Scatters each value to its recorded argmax position, zeros elsewhere.
Tensor4 unpool2x2_forward(const Tensor4& input, const PoolIndices& indices);
Tensor4 unpool2x2_backward(const Tensor4& grad_output, const PoolIndices& indices);

Tensor4 upsample_nearest2x_forward(const Tensor4& input);
Tensor4 upsample_nearest2x_backward(const Tensor4& grad_output);

Tensor4 relu_forward(const Tensor4& input);
/// Gradient passes where the forward input was strictly positive.
Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output);

}  // namespace tfrhss::nn
