#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tfrhss/nn/tensor.hpp"

namespace tfrhss::nn {

/// Named parameters with same-shape gradient slots, iterated in insertion order.
class ParamStore {
 public:
  /// Returns the new parameter's index. Names must be unique.
  std::size_t add(const std::string& name, Tensor4 value);

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  Tensor4& value(std::size_t i) { return values_.at(i); }
  const Tensor4& value(std::size_t i) const { return values_.at(i); }
  Tensor4& grad(std::size_t i) { return grads_.at(i); }
  const Tensor4& grad(std::size_t i) const { return grads_.at(i); }
  /// Throws std::out_of_range for unknown names.
  std::size_t index(const std::string& name) const;

  void zero_grad();
  std::size_t scalar_count() const;
  /// Copy of the structure with zeroed gradients; the values are copied too.
  ParamStore clone() const;
  bool same_values(const ParamStore& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor4> values_;
  std::vector<Tensor4> grads_;
};

/// U(-b, b) with b = sqrt(6 / fan_in), fan_in = in_channels * k * k.
void he_uniform(Tensor4& weight, std::mt19937_64& rng);

struct Checkpoint {
  std::string descriptor;
  ParamStore params;
};

/// "TFRW" file: u32 version, descriptor string, u32 count, then per parameter
/// name string, u32 ndims (4), u32 dims, f32 payload. Strings are u32
/// length-prefixed UTF-8; everything is little-endian.
void save_checkpoint(const std::string& path, const std::string& descriptor, const ParamStore& params);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tfrhss::nn
