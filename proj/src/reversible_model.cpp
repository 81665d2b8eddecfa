#include "tfrhss/reversible_model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tfrhss/binary_io.hpp"
#include "tfrhss/config.hpp"

namespace tfrhss {

using nn::Dims;
using nn::Tape;
using nn::Tensor4;

namespace {

constexpr const char* kDescriptorTag = "tfrhss-reversible";

int decoder_width(const std::vector<int>& widths, std::size_t level) {
  const std::size_t depth = widths.size();
  return level + 2 <= depth ? widths[depth - 2 - level] : widths[0];
}

std::vector<std::string> subnet_prefixes(const ModelConfig& c) {
  if (c.single_net) return {"net1."};
  return {"net1.", "net2."};
}

}  // namespace

FlipMode parse_flip_mode(const std::string& s) {
  if (s == "main") return FlipMode::main;
  if (s == "anti") return FlipMode::anti;
  if (s == "off") return FlipMode::off;
  throw std::invalid_argument("unknown flip mode '" + s + "' (expected main, anti or off)");
}

std::string to_string(FlipMode m) {
  switch (m) {
    case FlipMode::main: return "main";
    case FlipMode::anti: return "anti";
    case FlipMode::off: return "off";
  }
  return "?";
}

Tensor4 diagonal_flip(const Tensor4& x, FlipMode mode) {
  const Dims& d = x.dims();
  if (d.h != d.w) throw ShapeError("diagonal_flip: spatial dims must be square, got " + d.str());
  if (mode == FlipMode::off) return x;
  const int n = d.h;
  Tensor4 out(d);
  for (int b = 0; b < d.b; ++b)
    for (int c = 0; c < d.c; ++c) {
      const float* src = x.data() + x.offset(b, c, 0, 0);
      float* dst = out.data() + out.offset(b, c, 0, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dst[i * n + j] = mode == FlipMode::main ? src[j * n + i] : src[(n - 1 - j) * n + (n - 1 - i)];
    }
  return out;
}

void ModelConfig::validate() const {
  if (widths.empty() || widths.size() > 6) throw SpecError("model: need 1 to 6 encoder levels");
  for (int w : widths)
    if (w < 1 || w > 1024) throw SpecError("model: channel width out of range");
  if (n_cells < pooling_factor() || n_cells % pooling_factor() != 0)
    throw ShapeError("model: N=" + std::to_string(n_cells) + " is not divisible by the pooling factor " +
                     std::to_string(pooling_factor()));
  if (!(scale > 0.0) || !std::isfinite(t0)) throw SpecError("model: bad normalization");
  if (single_net && flip != FlipMode::off) throw SpecError("model: a single-net model has no flip");
}

std::string ModelConfig::descriptor() const {
  std::ostringstream os;
  os << kDescriptorTag << " n=" << n_cells << " widths=";
  for (std::size_t i = 0; i < widths.size(); ++i) os << (i ? "," : "") << widths[i];
  os << " nets=" << (single_net ? 1 : 2) << " flip=" << to_string(flip) << " t0=" << format_double(t0)
     << " scale=" << format_double(scale);
  return os.str();
}

ModelConfig ModelConfig::parse_descriptor(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  if (!(is >> tok) || tok != kDescriptorTag) throw FormatError("model descriptor: unknown architecture '" + tok + "'");
  ModelConfig c;
  bool seen[6] = {};
  auto number = [&](const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size()) throw FormatError("model descriptor: bad number '" + v + "'");
    return x;
  };
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("model descriptor: bad token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    int slot = -1;
    if (key == "n") {
      slot = 0;
      c.n_cells = static_cast<int>(number(val));
    } else if (key == "widths") {
      slot = 1;
      c.widths.clear();
      std::istringstream ws(val);
      std::string part;
      while (std::getline(ws, part, ',')) c.widths.push_back(static_cast<int>(number(part)));
    } else if (key == "nets") {
      slot = 2;
      const double v = number(val);
      if (v != 1.0 && v != 2.0) throw FormatError("model descriptor: nets must be 1 or 2");
      c.single_net = v == 1.0;
    } else if (key == "flip") {
      slot = 3;
      try {
        c.flip = parse_flip_mode(val);
      } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("model descriptor: ") + e.what());
      }
    } else if (key == "t0") {
      slot = 4;
      c.t0 = number(val);
    } else if (key == "scale") {
      slot = 5;
      c.scale = number(val);
    } else {
      throw FormatError("model descriptor: unknown key '" + key + "'");
    }
    if (seen[slot]) throw FormatError("model descriptor: duplicate key '" + key + "'");
    seen[slot] = true;
  }
  for (bool s : seen)
    if (!s) throw FormatError("model descriptor: missing key in '" + text + "'");
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw FormatError(std::string("model descriptor: ") + e.what());
  }
  return c;
}

nn::ParamStore make_param_layout(const ModelConfig& c) {
  c.validate();
  nn::ParamStore p;
  for (const auto& prefix : subnet_prefixes(c)) {
    int in = 1;
    for (std::size_t i = 0; i < c.widths.size(); ++i) {
      p.add(prefix + "enc" + std::to_string(i) + ".w", Tensor4({c.widths[i], in, 3, 3}));
      p.add(prefix + "enc" + std::to_string(i) + ".b", Tensor4({1, c.widths[i], 1, 1}));
      in = c.widths[i];
    }
    for (std::size_t i = 0; i < c.widths.size(); ++i) {
      const int out = decoder_width(c.widths, i);
      p.add(prefix + "dec" + std::to_string(i) + ".w", Tensor4({out, in, 3, 3}));
      p.add(prefix + "dec" + std::to_string(i) + ".b", Tensor4({1, out, 1, 1}));
      in = out;
    }
    p.add(prefix + "out.w", Tensor4({1, in, 3, 3}));
    p.add(prefix + "out.b", Tensor4({1, 1, 1, 1}));
  }
  return p;
}

ReversibleNet::ReversibleNet(const ModelConfig& config, std::uint64_t seed)
    : config_(config), params_(make_param_layout(config)) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_.value(i).dims().h == 3) nn::he_uniform(params_.value(i), rng);
}

ReversibleNet::ReversibleNet(const ModelConfig& config, nn::ParamStore params)
    : config_(config), params_(std::move(params)) {
  check_params();
}

void ReversibleNet::check_params() const {
  const nn::ParamStore layout = make_param_layout(config_);
  if (layout.size() != params_.size())
    throw ShapeError("model: expected " + std::to_string(layout.size()) + " parameters, got " +
                     std::to_string(params_.size()));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout.name(i) != params_.name(i))
      throw ShapeError("model: parameter " + std::to_string(i) + " is '" + params_.name(i) + "', expected '" +
                       layout.name(i) + "'");
    if (layout.value(i).dims() != params_.value(i).dims())
      throw ShapeError("model: parameter '" + layout.name(i) + "' has dims " + params_.value(i).dims().str() +
                       ", expected " + layout.value(i).dims().str());
  }
}

Tape::Id ReversibleNet::record_subnet(Tape& tape, Tape::Id x, const std::string& prefix, nn::ParamStore* grads) const {
  auto param = [&](const std::string& name) {
    const std::size_t i = params_.index(prefix + name);
    return tape.parameter(params_.value(i), grads ? &grads->grad(i) : nullptr);
  };
  auto conv = [&](Tape::Id in, const std::string& layer) {
    const Tape::Id w = param(layer + ".w");
    const Tape::Id b = param(layer + ".b");
    return tape.conv2d(in, w, b);
  };
  Tape::Id h = x;
  for (std::size_t i = 0; i < config_.widths.size(); ++i)
    h = tape.maxpool2x2(tape.relu(conv(h, "enc" + std::to_string(i))));
  for (std::size_t i = 0; i < config_.widths.size(); ++i)
    h = tape.relu(conv(tape.upsample2x(h), "dec" + std::to_string(i)));
  return conv(h, "out");
}

Tape::Id ReversibleNet::record(Tape& tape, const Tensor4& input, nn::ParamStore* grads) const {
  const int n = config_.n_cells;
  if (input.dims().c != 1 || input.dims().h != n || input.dims().w != n)
    throw ShapeError("model: expected input (B,1," + std::to_string(n) + "," + std::to_string(n) + "), got " +
                     input.dims().str());
  const float inv = static_cast<float>(1.0 / config_.scale);
  Tape::Id h = tape.affine(tape.input(input), inv, static_cast<float>(-config_.t0 / config_.scale));
  h = record_subnet(tape, h, "net1.", grads);
  if (!config_.single_net) {
    const FlipMode mode = config_.flip;
    if (mode == FlipMode::off) {
      h = record_subnet(tape, h, "net2.", grads);
    } else {
      auto flip = [mode](const Tensor4& t) { return diagonal_flip(t, mode); };
      h = tape.linear(h, flip, flip);
      h = record_subnet(tape, h, "net2.", grads);
      // Undo the flip so the output is in the input's orientation.
      h = tape.linear(h, flip, flip);
    }
  }
  return tape.affine(h, static_cast<float>(config_.scale), static_cast<float>(config_.t0));
}

Field ReversibleNet::predict(const Field& monitoring) const {
  if (monitoring.n() != config_.n_cells)
    throw ShapeError("model: monitoring is " + std::to_string(monitoring.n()) + "x" + std::to_string(monitoring.n()) +
                     ", net expects " + std::to_string(config_.n_cells));
  Tape tape;
  const Tape::Id out = record(tape, nn::from_field(monitoring), nullptr);
  return nn::to_field(tape.value(out));
}

void ReversibleNet::save(const std::string& path) const { nn::save_checkpoint(path, config_.descriptor(), params_); }

ReversibleNet ReversibleNet::load(const std::string& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  ModelConfig config = ModelConfig::parse_descriptor(ck.descriptor);
  try {
    return ReversibleNet(config, std::move(ck.params));
  } catch (const ShapeError& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

}  // namespace tfrhss
