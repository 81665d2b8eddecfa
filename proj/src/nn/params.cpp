#include "tfrhss/nn/params.hpp"

#include <cmath>
#include <stdexcept>

#include "tfrhss/binary_io.hpp"

namespace tfrhss::nn {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'R', 'W'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxString = 1u << 16;
constexpr std::uint32_t kMaxCount = 1u << 16;
constexpr std::uint32_t kMaxDim = 1u << 16;

}  // namespace

std::size_t ParamStore::add(const std::string& name, Tensor4 value) {
  for (const auto& n : names_)
    if (n == name) throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
  if (value.empty()) throw ShapeError("ParamStore: parameter '" + name + "' is empty");
  names_.push_back(name);
  grads_.emplace_back(value.dims());
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::size_t ParamStore::index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw std::out_of_range("ParamStore: no parameter '" + name + "'");
}

void ParamStore::zero_grad() {
  for (auto& g : grads_) g.fill(0.0f);
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

ParamStore ParamStore::clone() const {
  ParamStore out = *this;
  out.zero_grad();
  return out;
}

bool ParamStore::same_values(const ParamStore& other) const {
  return names_ == other.names_ && values_ == other.values_;
}

void he_uniform(Tensor4& weight, std::mt19937_64& rng) {
  const Dims& d = weight.dims();
  const double fan_in = static_cast<double>(d.c) * d.h * d.w;
  const double bound = std::sqrt(6.0 / fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : weight.values()) v = static_cast<float>(dist(rng));
}

void save_checkpoint(const std::string& path, const std::string& descriptor, const ParamStore& params) {
  io::Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.str(descriptor);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor4& v = params.value(i);
    w.str(params.name(i));
    w.u32(4);
    const Dims& d = v.dims();
    for (int x : {d.b, d.c, d.h, d.w}) w.u32(static_cast<std::uint32_t>(x));
    w.floats(v.data(), v.size());
  }
  w.finish(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  io::Reader r(path);
  r.expect_magic(kMagic);
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw FormatError("'" + path + "': unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  ck.descriptor = r.str(kMaxString);
  const std::uint32_t count = r.u32();
  if (count > kMaxCount) throw FormatError("'" + path + "': parameter count out of range");
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str(kMaxString);
    if (r.u32() != 4) throw FormatError("'" + path + "': parameter '" + name + "' is not 4-D");
    std::uint32_t dims[4];
    for (auto& x : dims) {
      x = r.u32();
      if (x == 0 || x > kMaxDim) throw FormatError("'" + path + "': bad dimension in '" + name + "'");
    }
    Tensor4 t({static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]), static_cast<int>(dims[3])});
    r.floats(t.data(), t.size());
    for (float v : t.values())
      if (!std::isfinite(v)) throw FormatError("'" + path + "': non-finite value in '" + name + "'");
    try {
      ck.params.add(name, std::move(t));
    } catch (const std::invalid_argument& e) {
      throw FormatError("'" + path + "': " + e.what());
    }
  }
  r.expect_eof();
  return ck;
}

}  // namespace tfrhss::nn
