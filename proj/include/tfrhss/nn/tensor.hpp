#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tfrhss/grid.hpp"

namespace tfrhss::nn {

struct Dims {
  int b = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(b) * static_cast<std::size_t>(c) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(w);
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }
  bool operator==(const Dims&) const = default;
  std::string str() const;
};

/// Allocator that leaves resized storage uninitialized.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  using std::allocator<T>::allocator;
  template <class U>
  void construct(U* p) {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

using FloatStorage = std::vector<float, DefaultInitAllocator<float>>;

/// Dense (batch, channel, height, width) float tensor, row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Dims d, float fill = 0.0f);
  /// Storage left uninitialized; the caller overwrites every element.
  static Tensor4 uninitialized(Dims d);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  FloatStorage& values() { return data_; }
  const FloatStorage& values() const { return data_; }

  float& at(int b, int c, int h, int w) { return data_[offset(b, c, h, w)]; }
  float at(int b, int c, int h, int w) const { return data_[offset(b, c, h, w)]; }
  float& operator[](std::size_t k) { return data_[k]; }
  float operator[](std::size_t k) const { return data_[k]; }

  std::size_t offset(int b, int c, int h, int w) const {
    return ((static_cast<std::size_t>(b) * dims_.c + c) * dims_.h + h) * dims_.w + w;
  }

  void fill(float v);
  bool empty() const { return data_.empty(); }
  bool operator==(const Tensor4&) const = default;

 private:
  Dims dims_{};
  FloatStorage data_;
};

void require_dims(const Tensor4& t, const Dims& d, const char* what);

/// f64 inner product of two same-shaped tensors.
double dot(const Tensor4& a, const Tensor4& b);

/// Single-sample, single-channel tensor view of a field and back.
Tensor4 from_field(const Field& f);
Field to_field(const Tensor4& t, int batch = 0, int channel = 0);

}  // namespace tfrhss::nn
