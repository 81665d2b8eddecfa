#include "tfrhss/nn/tensor.hpp"

#include <algorithm>

namespace tfrhss::nn {

std::string Dims::str() const {
  return "(" + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor4::Tensor4(Dims d, float fill) : dims_(d) {
  if (d.b <= 0 || d.c <= 0 || d.h <= 0 || d.w <= 0) throw ShapeError("Tensor4: non-positive dims " + d.str());
  data_.assign(d.count(), fill);
}

Tensor4 Tensor4::uninitialized(Dims d) {
  if (d.b <= 0 || d.c <= 0 || d.h <= 0 || d.w <= 0) throw ShapeError("Tensor4: non-positive dims " + d.str());
  Tensor4 t;
  t.dims_ = d;
  t.data_.resize(d.count());
  return t;
}

void Tensor4::fill(float v) { std::fill(data_.begin(), data_.end(), v); }

void require_dims(const Tensor4& t, const Dims& d, const char* what) {
  if (t.dims() != d) throw ShapeError(std::string(what) + ": expected " + d.str() + ", got " + t.dims().str());
}

double dot(const Tensor4& a, const Tensor4& b) {
  if (a.dims() != b.dims()) throw ShapeError("dot: shape mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return s;
}

Tensor4 from_field(const Field& f) {
  Tensor4 t({1, 1, f.n(), f.n()});
  for (std::size_t k = 0; k < f.size(); ++k) t[k] = static_cast<float>(f[k]);
  return t;
}

Field to_field(const Tensor4& t, int batch, int channel) {
  const Dims& d = t.dims();
  if (d.h != d.w) throw ShapeError("to_field: tensor is not square");
  Field f(d.h, 0.0);
  const std::size_t base = t.offset(batch, channel, 0, 0);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = t[base + k];
  return f;
}

}  // namespace tfrhss::nn
