#include "tfrhss/nn/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>

namespace tfrhss::nn {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvGeometry {
  int in_c, h, w, out_c, k, out_h, out_w;
};

ConvGeometry geometry(const Tensor4& input, const Tensor4& weight, const ConvOptions& opt) {
  const Dims& x = input.dims();
  const Dims& wd = weight.dims();
  if (wd.h != wd.w) throw ShapeError("conv2d: kernel must be square");
  if (wd.c != x.c) throw ShapeError("conv2d: input has " + std::to_string(x.c) + " channels, kernel expects " +
                                    std::to_string(wd.c));
  if (opt.stride < 1 || opt.pad < 0) throw ShapeError("conv2d: bad stride/pad");
  const int k = wd.h;
  if (k > x.h + 2 * opt.pad || k > x.w + 2 * opt.pad) throw ShapeError("conv2d: kernel larger than padded input");
  return {x.c, x.h, x.w, wd.b, k, (x.h + 2 * opt.pad - k) / opt.stride + 1, (x.w + 2 * opt.pad - k) / opt.stride + 1};
}

// Source index along one axis, or -1 for a zero-padded tap.
inline int source(int pos, int extent, PadMode mode) {
  if (pos >= 0 && pos < extent) return pos;
  if (mode == PadMode::zero) return -1;
  return std::clamp(pos, 0, extent - 1);
}

// Copies one channel plane into a (h + 2p) x (w + 2p) buffer with the
// padding applied, so that im2col rows become plain strided copies.
void pad_plane(const float* src, const ConvGeometry& g, const ConvOptions& opt, float* dst) {
  const int pw = g.w + 2 * opt.pad;
  for (int y = 0; y < g.h + 2 * opt.pad; ++y) {
    float* row = dst + static_cast<std::size_t>(y) * pw;
    const int sy = source(y - opt.pad, g.h, opt.mode);
    if (sy < 0) {
      std::fill(row, row + pw, 0.0f);
      continue;
    }
    const float* s = src + static_cast<std::size_t>(sy) * g.w;
    const float left = opt.mode == PadMode::zero ? 0.0f : s[0];
    const float right = opt.mode == PadMode::zero ? 0.0f : s[g.w - 1];
    std::fill(row, row + opt.pad, left);
    std::copy(s, s + g.w, row + opt.pad);
    std::fill(row + opt.pad + g.w, row + pw, right);
  }
}

// Adjoint of pad_plane: folds padded gradients back onto the plane.
void unpad_plane_add(const float* padded, const ConvGeometry& g, const ConvOptions& opt, float* dst) {
  const int pw = g.w + 2 * opt.pad;
  for (int y = 0; y < g.h + 2 * opt.pad; ++y) {
    const int sy = source(y - opt.pad, g.h, opt.mode);
    if (sy < 0) continue;
    const float* row = padded + static_cast<std::size_t>(y) * pw;
    float* d = dst + static_cast<std::size_t>(sy) * g.w;
    for (int x = 0; x < g.w; ++x) d[x] += row[opt.pad + x];
    if (opt.mode == PadMode::replicate) {
      for (int x = 0; x < opt.pad; ++x) {
        d[0] += row[x];
        d[g.w - 1] += row[opt.pad + g.w + x];
      }
    }
  }
}

void im2col(const float* x, const ConvGeometry& g, const ConvOptions& opt, float* col, std::vector<float>& pad) {
  const std::size_t cols = static_cast<std::size_t>(g.out_h) * g.out_w;
  const int pw = g.w + 2 * opt.pad;
  pad.resize(static_cast<std::size_t>(g.h + 2 * opt.pad) * pw);
  for (int c = 0; c < g.in_c; ++c) {
    pad_plane(x + static_cast<std::size_t>(c) * g.h * g.w, g, opt, pad.data());
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        float* row = col + (static_cast<std::size_t>(c) * g.k * g.k + ky * g.k + kx) * cols;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const float* src = pad.data() + static_cast<std::size_t>(oy * opt.stride + ky) * pw + kx;
          float* dst = row + static_cast<std::size_t>(oy) * g.out_w;
          if (opt.stride == 1) {
            std::copy(src, src + g.out_w, dst);
          } else {
            for (int ox = 0; ox < g.out_w; ++ox) dst[ox] = src[ox * opt.stride];
          }
        }
      }
    }
  }
}

void col2im(const float* col, const ConvGeometry& g, const ConvOptions& opt, float* dx, std::vector<float>& pad) {
  const std::size_t cols = static_cast<std::size_t>(g.out_h) * g.out_w;
  const int pw = g.w + 2 * opt.pad;
  pad.resize(static_cast<std::size_t>(g.h + 2 * opt.pad) * pw);
  for (int c = 0; c < g.in_c; ++c) {
    std::fill(pad.begin(), pad.end(), 0.0f);
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        const float* row = col + (static_cast<std::size_t>(c) * g.k * g.k + ky * g.k + kx) * cols;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const float* src = row + static_cast<std::size_t>(oy) * g.out_w;
          float* dst = pad.data() + static_cast<std::size_t>(oy * opt.stride + ky) * pw + kx;
          if (opt.stride == 1) {
            for (int ox = 0; ox < g.out_w; ++ox) dst[ox] += src[ox];
          } else {
            for (int ox = 0; ox < g.out_w; ++ox) dst[ox * opt.stride] += src[ox];
          }
        }
      }
    }
    unpad_plane_add(pad.data(), g, opt, dx + static_cast<std::size_t>(c) * g.h * g.w);
  }
}

// Input gradient of a stride-1 convolution computed as a correlation of the
// zero-extended output gradient over the padded input extent:
// dpad[c](Y, X) = sum w[oc][c][ky][kx] * go[oc](Y - ky, X - kx).
// Cheaper than col2im when out_c < in_c.
void input_grad_transposed(const float* go, const Tensor4& weight, const ConvGeometry& g, const ConvOptions& opt,
                           float* dx, std::vector<float>& gcol, std::vector<float>& w2, std::vector<float>& dpad) {
  const int ph = g.h + 2 * opt.pad, pw = g.w + 2 * opt.pad;
  const std::size_t pcols = static_cast<std::size_t>(ph) * pw;
  const int kk = g.k * g.k;
  const int grows = g.out_c * kk;
  gcol.resize(static_cast<std::size_t>(grows) * pcols);
  for (int oc = 0; oc < g.out_c; ++oc) {
    const float* plane = go + static_cast<std::size_t>(oc) * g.out_h * g.out_w;
    for (int ky = 0; ky < g.k; ++ky)
      for (int kx = 0; kx < g.k; ++kx) {
        float* row = gcol.data() + static_cast<std::size_t>(oc * kk + ky * g.k + kx) * pcols;
        std::fill(row, row + static_cast<std::size_t>(ky) * pw, 0.0f);
        for (int oy = 0; oy < g.out_h; ++oy) {
          const float* src = plane + static_cast<std::size_t>(oy) * g.out_w;
          float* dst = row + static_cast<std::size_t>(oy + ky) * pw;
          std::fill(dst, dst + kx, 0.0f);
          std::copy(src, src + g.out_w, dst + kx);
          std::fill(dst + kx + g.out_w, dst + pw, 0.0f);
        }
        std::fill(row + static_cast<std::size_t>(g.out_h + ky) * pw, row + pcols, 0.0f);
      }
  }
  w2.resize(static_cast<std::size_t>(g.in_c) * grows);
  for (int oc = 0; oc < g.out_c; ++oc)
    for (int c = 0; c < g.in_c; ++c)
      for (int t = 0; t < kk; ++t) w2[static_cast<std::size_t>(c) * grows + oc * kk + t] = weight[(static_cast<std::size_t>(oc) * g.in_c + c) * kk + t];
  dpad.resize(static_cast<std::size_t>(g.in_c) * pcols);
  Eigen::Map<const RowMat> wm(w2.data(), g.in_c, grows);
  Eigen::Map<const RowMat> gm(gcol.data(), grows, static_cast<Eigen::Index>(pcols));
  Eigen::Map<RowMat> dm(dpad.data(), g.in_c, static_cast<Eigen::Index>(pcols));
  dm.noalias() = wm * gm;
  for (int c = 0; c < g.in_c; ++c)
    unpad_plane_add(dpad.data() + static_cast<std::size_t>(c) * pcols, g, opt, dx + static_cast<std::size_t>(c) * g.h * g.w);
}

struct Scratch {
  std::vector<float> col, dcol, pad, w2;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

void require_even(const Dims& d, const char* what) {
  if (d.h % 2 != 0 || d.w % 2 != 0) throw ShapeError(std::string(what) + ": spatial dims must be even, got " + d.str());
}

}  // namespace

Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weight, const Tensor4& bias, const ConvOptions& opt) {
  const ConvGeometry g = geometry(input, weight, opt);
  if (!bias.empty()) require_dims(bias, {1, g.out_c, 1, 1}, "conv2d bias");
  const int batch = input.dims().b;
  Tensor4 out = Tensor4::uninitialized({batch, g.out_c, g.out_h, g.out_w});
  const int rows = g.in_c * g.k * g.k;
  const int cols = g.out_h * g.out_w;
  Scratch& sc = scratch();
  std::vector<float>& col = sc.col;
  std::vector<float>& pad = sc.pad;
  col.resize(static_cast<std::size_t>(rows) * cols);
  Eigen::Map<const RowMat> w(weight.data(), g.out_c, rows);
  for (int b = 0; b < batch; ++b) {
    im2col(input.data() + input.offset(b, 0, 0, 0), g, opt, col.data(), pad);
    Eigen::Map<const RowMat> cm(col.data(), rows, cols);
    Eigen::Map<RowMat> om(out.data() + out.offset(b, 0, 0, 0), g.out_c, cols);
    om.noalias() = w * cm;
    if (!bias.empty())
      for (int oc = 0; oc < g.out_c; ++oc) om.row(oc).array() += bias[oc];
  }
  return out;
}

ConvGrads conv2d_backward(const Tensor4& input, const Tensor4& weight, const Tensor4& grad_output,
                          const ConvOptions& opt, bool need_input_grad) {
  const ConvGeometry g = geometry(input, weight, opt);
  const int batch = input.dims().b;
  require_dims(grad_output, {batch, g.out_c, g.out_h, g.out_w}, "conv2d grad_output");
  const int rows = g.in_c * g.k * g.k;
  const int cols = g.out_h * g.out_w;

  ConvGrads grads;
  grads.weight = Tensor4(weight.dims());
  grads.bias = Tensor4({1, g.out_c, 1, 1});
  if (need_input_grad) grads.input = Tensor4(input.dims());

  Scratch& sc = scratch();
  std::vector<float>& col = sc.col;
  std::vector<float>& dcol = sc.dcol;
  std::vector<float>& pad = sc.pad;
  col.resize(static_cast<std::size_t>(rows) * cols);
  const bool transposed = opt.stride == 1 && g.out_c < g.in_c;
  if (need_input_grad && !transposed) dcol.resize(col.size());
  Eigen::Map<const RowMat> w(weight.data(), g.out_c, rows);
  Eigen::Map<RowMat> dw(grads.weight.data(), g.out_c, rows);
  std::vector<double> db(g.out_c, 0.0);
  for (int b = 0; b < batch; ++b) {
    Eigen::Map<const RowMat> go(grad_output.data() + grad_output.offset(b, 0, 0, 0), g.out_c, cols);
    im2col(input.data() + input.offset(b, 0, 0, 0), g, opt, col.data(), pad);
    Eigen::Map<const RowMat> cm(col.data(), rows, cols);
    dw.noalias() += go * cm.transpose();
    for (int oc = 0; oc < g.out_c; ++oc) {
      const float* r = go.data() + static_cast<std::size_t>(oc) * cols;
      double s = 0.0;
      for (int j = 0; j < cols; ++j) s += r[j];
      db[oc] += s;
    }
    if (need_input_grad && transposed) {
      input_grad_transposed(go.data(), weight, g, opt, grads.input.data() + grads.input.offset(b, 0, 0, 0), dcol, sc.w2,
                            pad);
    } else if (need_input_grad) {
      Eigen::Map<RowMat> dcm(dcol.data(), rows, cols);
      dcm.noalias() = w.transpose() * go;
      col2im(dcol.data(), g, opt, grads.input.data() + grads.input.offset(b, 0, 0, 0), pad);
    }
  }
  for (int oc = 0; oc < g.out_c; ++oc) grads.bias[oc] = static_cast<float>(db[oc]);
  return grads;
}

PoolResult maxpool2x2_forward(const Tensor4& input) {
  const Dims& d = input.dims();
  require_even(d, "maxpool2x2");
  PoolResult res{Tensor4::uninitialized({d.b, d.c, d.h / 2, d.w / 2}), {d, {}}};
  res.indices.argmax.resize(res.output.size());
  std::size_t o = 0;
  for (int b = 0; b < d.b; ++b) {
    for (int c = 0; c < d.c; ++c) {
      const float* plane = input.data() + input.offset(b, c, 0, 0);
      for (int y = 0; y < d.h / 2; ++y) {
        for (int x = 0; x < d.w / 2; ++x, ++o) {
          const int base = 2 * y * d.w + 2 * x;
          const int cand[4] = {base, base + 1, base + d.w, base + d.w + 1};
          int best = cand[0];
          for (int i = 1; i < 4; ++i)
            if (plane[cand[i]] > plane[best]) best = cand[i];
          res.output[o] = plane[best];
          res.indices.argmax[o] = best;
        }
      }
    }
  }
  return res;
}

Tensor4 maxpool2x2_backward(const Tensor4& grad_output, const PoolIndices& indices) {
  const Dims& in = indices.input_dims;
  require_dims(grad_output, {in.b, in.c, in.h / 2, in.w / 2}, "maxpool2x2 grad_output");
  if (indices.argmax.size() != grad_output.size()) throw ShapeError("maxpool2x2: index tensor mismatch");
  Tensor4 grad(in);
  const std::size_t out_plane = static_cast<std::size_t>(in.h / 2) * (in.w / 2);
  for (std::size_t o = 0; o < grad_output.size(); ++o) {
    const std::size_t plane = o / out_plane;
    grad[plane * in.plane() + indices.argmax[o]] += grad_output[o];
  }
  return grad;
}

Tensor4 unpool2x2_forward(const Tensor4& input, const PoolIndices& indices) {
  const Dims& out_d = indices.input_dims;
  require_dims(input, {out_d.b, out_d.c, out_d.h / 2, out_d.w / 2}, "unpool2x2 input");
  if (indices.argmax.size() != input.size()) throw ShapeError("unpool2x2: index tensor mismatch");
  Tensor4 out(out_d);
  const std::size_t in_plane = input.dims().plane();
  for (std::size_t o = 0; o < input.size(); ++o) out[(o / in_plane) * out_d.plane() + indices.argmax[o]] = input[o];
  return out;
}

Tensor4 unpool2x2_backward(const Tensor4& grad_output, const PoolIndices& indices) {
  const Dims& out_d = indices.input_dims;
  require_dims(grad_output, out_d, "unpool2x2 grad_output");
  Tensor4 grad = Tensor4::uninitialized({out_d.b, out_d.c, out_d.h / 2, out_d.w / 2});
  const std::size_t in_plane = grad.dims().plane();
  for (std::size_t o = 0; o < grad.size(); ++o) grad[o] = grad_output[(o / in_plane) * out_d.plane() + indices.argmax[o]];
  return grad;
}

Tensor4 upsample_nearest2x_forward(const Tensor4& input) {
  const Dims& d = input.dims();
  Tensor4 out = Tensor4::uninitialized({d.b, d.c, 2 * d.h, 2 * d.w});
  for (int b = 0; b < d.b; ++b)
    for (int c = 0; c < d.c; ++c)
      for (int y = 0; y < 2 * d.h; ++y) {
        const float* src = input.data() + input.offset(b, c, y / 2, 0);
        float* dst = out.data() + out.offset(b, c, y, 0);
        for (int x = 0; x < 2 * d.w; ++x) dst[x] = src[x / 2];
      }
  return out;
}

Tensor4 upsample_nearest2x_backward(const Tensor4& grad_output) {
  const Dims& d = grad_output.dims();
  require_even(d, "upsample_nearest2x backward");
  Tensor4 grad({d.b, d.c, d.h / 2, d.w / 2});
  for (int b = 0; b < d.b; ++b)
    for (int c = 0; c < d.c; ++c)
      for (int y = 0; y < d.h; ++y) {
        const float* src = grad_output.data() + grad_output.offset(b, c, y, 0);
        float* dst = grad.data() + grad.offset(b, c, y / 2, 0);
        for (int x = 0; x < d.w; ++x) dst[x / 2] += src[x];
      }
  return grad;
}

Tensor4 relu_forward(const Tensor4& input) {
  Tensor4 out = input;
  for (auto& v : out.values()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output) {
  require_dims(grad_output, input.dims(), "relu grad_output");
  Tensor4 grad = Tensor4::uninitialized(input.dims());
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = input[k] > 0.0f ? grad_output[k] : 0.0f;
  return grad;
}

}  // namespace tfrhss::nn
