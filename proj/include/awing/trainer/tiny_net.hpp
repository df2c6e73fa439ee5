#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "awing/types.hpp"

namespace awing::trainer {

namespace kernels {

/// Unrolls the k×k patches of `in` (zero padding k/2) into a
/// (cin·k·k) × (oh·ow) matrix so a convolution becomes a matrix product.
template <class T>
void im2col(const T* in, std::size_t cin, std::size_t ih, std::size_t iw, std::size_t k, std::size_t stride, T* col,
            std::size_t oh, std::size_t ow) {
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const auto s = static_cast<std::ptrdiff_t>(stride);
  for (std::size_t ic = 0; ic < cin; ++ic) {
    const T* x = in + ic * ih * iw;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = col + ((ic * k + ky) * k + kx) * oh * ow;
        const std::ptrdiff_t offx = static_cast<std::ptrdiff_t>(kx) - pad;
        const std::ptrdiff_t offy = static_cast<std::ptrdiff_t>(ky) - pad;
        for (std::size_t oy = 0; oy < oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy) * s + offy;
          T* dst = row + oy * ow;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(ih)) {
            std::fill(dst, dst + ow, T(0));
            continue;
          }
          const T* xrow = x + iy * static_cast<std::ptrdiff_t>(iw);
          for (std::size_t ox = 0; ox < ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox) * s + offx;
            dst[ox] = (ix >= 0 && ix < static_cast<std::ptrdiff_t>(iw)) ? xrow[ix] : T(0);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatters-adds the column matrix back onto `din`.
template <class T>
void col2im(const T* col, std::size_t cin, std::size_t ih, std::size_t iw, std::size_t k, std::size_t stride, T* din,
            std::size_t oh, std::size_t ow) {
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const auto s = static_cast<std::ptrdiff_t>(stride);
  for (std::size_t ic = 0; ic < cin; ++ic) {
    T* x = din + ic * ih * iw;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = col + ((ic * k + ky) * k + kx) * oh * ow;
        const std::ptrdiff_t offx = static_cast<std::ptrdiff_t>(kx) - pad;
        const std::ptrdiff_t offy = static_cast<std::ptrdiff_t>(ky) - pad;
        for (std::size_t oy = 0; oy < oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy) * s + offy;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(ih)) continue;
          const T* src = row + oy * ow;
          T* xrow = x + iy * static_cast<std::ptrdiff_t>(iw);
          for (std::size_t ox = 0; ox < ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox) * s + offx;
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(iw)) xrow[ix] += src[ox];
          }
        }
      }
    }
  }
}

/// Fixed-order dot product with eight interleaved partial sums.
template <class T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  T tail = T(0);
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <class T>
T sum(const T* a, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l];
  }
  T tail = T(0);
  for (; i < n; ++i) tail += a[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

/// out[oc][p] = bias[oc] + Σ_j weight[oc][j]·col[j][p].
template <class T>
void conv_forward(const T* col, std::size_t rows, const T* weight, const T* bias, std::size_t cout, T* out,
                  std::size_t plane) {
  for (std::size_t oc = 0; oc < cout; ++oc) {
    T* o = out + oc * plane;
    std::fill(o, o + plane, bias[oc]);
    const T* w = weight + oc * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const T wv = w[j];
      const T* c = col + j * plane;
      for (std::size_t p = 0; p < plane; ++p) o[p] += wv * c[p];
    }
  }
}

/// Accumulates weight/bias gradients and, if dcol is non-null, overwrites
/// dcol with d(objective)/d(col).
template <class T>
void conv_backward(const T* col, std::size_t rows, const T* weight, std::size_t cout, const T* dout, std::size_t plane,
                   T* dweight, T* dbias, T* dcol) {
  for (std::size_t oc = 0; oc < cout; ++oc) {
    const T* g = dout + oc * plane;
    dbias[oc] += sum(g, plane);
    T* dw = dweight + oc * rows;
    for (std::size_t j = 0; j < rows; ++j) dw[j] += dot(g, col + j * plane, plane);
  }
  if (!dcol) return;
  std::fill(dcol, dcol + rows * plane, T(0));
  for (std::size_t oc = 0; oc < cout; ++oc) {
    const T* g = dout + oc * plane;
    const T* w = weight + oc * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const T wv = w[j];
      T* d = dcol + j * plane;
      for (std::size_t p = 0; p < plane; ++p) d[p] += wv * g[p];
    }
  }
}

/// (4K, h, w) -> (K, 2h, 2w); sub-channel dy*2+dx lands at offset (dy, dx).
template <class T>
void pixel_shuffle(const T* in, std::size_t k, std::size_t h, std::size_t w, T* out) {
  const std::size_t ow = 2 * w;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t sub = 0; sub < 4; ++sub) {
      const std::size_t dy = sub / 2;
      const std::size_t dx = sub % 2;
      const T* src = in + (c * 4 + sub) * h * w;
      T* dst = out + c * 4 * h * w;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) dst[(2 * y + dy) * ow + 2 * x + dx] = src[y * w + x];
      }
    }
  }
}

template <class T>
void pixel_unshuffle(const T* in, std::size_t k, std::size_t h, std::size_t w, T* out) {
  const std::size_t ow = 2 * w;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t sub = 0; sub < 4; ++sub) {
      const std::size_t dy = sub / 2;
      const std::size_t dx = sub % 2;
      const T* src = in + c * 4 * h * w;
      T* dst = out + (c * 4 + sub) * h * w;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) dst[y * w + x] = src[(2 * y + dy) * ow + 2 * x + dx];
      }
    }
  }
}

}  // namespace kernels

/// Layer widths of the regressor. The defaults keep the network well under
/// 20k parameters.
struct NetShape {
  std::size_t in_channels = 1;
  std::size_t out_channels = 5;
  std::size_t stem_width = 8;
  std::size_t body_width = 16;
  std::size_t body_layers = 2;

  friend bool operator==(const NetShape&, const NetShape&) = default;
};

struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;

  friend bool operator==(const ParamTensor&, const ParamTensor&) = default;
};

/// Small fully-convolutional heatmap regressor:
///   3×3 stride-2 conv + ReLU (downsample)
///   body_layers × (3×3 conv + ReLU)
///   1×1 conv to 4·out_channels, then a 2× pixel shuffle (upsample).
/// Output has the input's frame; both sides of the frame must be even.
template <class T>
class TinyNet {
 public:
  struct Conv {
    std::size_t in;
    std::size_t out;
    std::size_t k;
    std::size_t stride;
    std::size_t weight;  // offset into params
    std::size_t bias;
    bool relu;

    friend bool operator==(const Conv&, const Conv&) = default;
  };

  /// Activations of one forward pass, reused across calls to avoid reallocation.
  struct Workspace {
    Frame frame{};
    std::vector<T> input;
    std::vector<std::vector<T>> cols;  // im2col of each conv's input
    std::vector<std::vector<T>> acts;  // output of each conv (post-ReLU where applicable)
    std::vector<T> output;
    std::vector<T> grad_a;
    std::vector<T> grad_b;
    std::vector<T> grad_col;
  };

  TinyNet() = default;

  TinyNet(NetShape shape, std::uint64_t seed) : shape_(shape) {
    if (shape.in_channels == 0 || shape.out_channels == 0 || shape.stem_width == 0 || shape.body_width == 0) {
      throw DomainError("network widths must be positive");
    }
    add_conv("stem", shape.in_channels, shape.stem_width, 3, 2, true);
    std::size_t width = shape.stem_width;
    for (std::size_t i = 0; i < shape.body_layers; ++i) {
      add_conv("body" + std::to_string(i), width, shape.body_width, 3, 1, true);
      width = shape.body_width;
    }
    add_conv("head", width, 4 * shape.out_channels, 1, 1, false);
    params_.assign(param_count_, T(0));
    initialize(seed);
  }

  const NetShape& shape() const noexcept { return shape_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<T> parameters() noexcept { return params_; }
  std::span<const T> parameters() const noexcept { return params_; }
  const std::vector<ParamTensor>& tensors() const noexcept { return tensors_; }

  static void check_frame(Frame f) {
    if (f.height < 2 || f.width < 2 || f.height % 2 || f.width % 2) {
      throw DomainError("network frame must have even sides >= 2, got " + to_string(f));
    }
  }

  /// input: in_channels × frame, row-major. Result in ws.output (out_channels × frame).
  void forward(std::span<const T> input, Frame frame, Workspace& ws) const {
    check_frame(frame);
    if (input.size() != shape_.in_channels * frame.area()) throw ShapeError("network input size mismatch");
    ws.frame = frame;
    ws.input.assign(input.begin(), input.end());
    const std::size_t h = frame.height / 2;
    const std::size_t w = frame.width / 2;
    ws.acts.resize(convs_.size());
    ws.cols.resize(convs_.size());
    const T* src = ws.input.data();
    std::size_t ih = frame.height;
    std::size_t iw = frame.width;
    const std::size_t plane = h * w;
    for (std::size_t l = 0; l < convs_.size(); ++l) {
      const Conv& c = convs_[l];
      const std::size_t rows = c.in * c.k * c.k;
      auto& col = ws.cols[l];
      col.resize(rows * plane);
      kernels::im2col(src, c.in, ih, iw, c.k, c.stride, col.data(), h, w);
      auto& dst = ws.acts[l];
      dst.resize(c.out * plane);
      kernels::conv_forward(col.data(), rows, params_.data() + c.weight, params_.data() + c.bias, c.out, dst.data(),
                            plane);
      if (c.relu) {
        for (auto& v : dst) v = v > T(0) ? v : T(0);
      }
      src = dst.data();
      ih = h;
      iw = w;
    }
    ws.output.resize(shape_.out_channels * frame.area());
    kernels::pixel_shuffle(ws.acts.back().data(), shape_.out_channels, h, w, ws.output.data());
  }

  /// Backpropagates d(objective)/d(output) through the last forward pass in
  /// `ws`, accumulating into `grad` (same layout as parameters()).
  void backward(Workspace& ws, std::span<const T> dout, std::span<T> grad) const {
    if (dout.size() != ws.output.size()) throw ShapeError("output gradient size mismatch");
    if (grad.size() != params_.size()) throw ShapeError("parameter gradient size mismatch");
    const std::size_t h = ws.frame.height / 2;
    const std::size_t w = ws.frame.width / 2;
    ws.grad_a.resize(ws.acts.back().size());
    kernels::pixel_unshuffle(dout.data(), shape_.out_channels, h, w, ws.grad_a.data());
    const std::size_t plane = h * w;
    for (std::size_t l = convs_.size(); l-- > 0;) {
      const Conv& c = convs_[l];
      if (c.relu) {
        const auto& a = ws.acts[l];
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (!(a[i] > T(0))) ws.grad_a[i] = T(0);
        }
      }
      const bool first = l == 0;
      const std::size_t rows = c.in * c.k * c.k;
      T* dcol = nullptr;
      if (!first) {
        ws.grad_col.resize(rows * plane);
        dcol = ws.grad_col.data();
      }
      kernels::conv_backward(ws.cols[l].data(), rows, params_.data() + c.weight, c.out, ws.grad_a.data(), plane,
                             grad.data() + c.weight, grad.data() + c.bias, dcol);
      if (!first) {
        // Every layer after the stem runs at the reduced resolution.
        ws.grad_b.assign(c.in * plane, T(0));
        kernels::col2im(dcol, c.in, h, w, c.k, c.stride, ws.grad_b.data(), h, w);
        std::swap(ws.grad_a, ws.grad_b);
      }
    }
  }

  /// Replaces every parameter; used when loading a dump.
  void set_parameters(std::span<const T> values) {
    if (values.size() != params_.size()) throw ShapeError("parameter count mismatch");
    std::copy(values.begin(), values.end(), params_.begin());
  }

  friend bool operator==(const TinyNet&, const TinyNet&) = default;

 private:
  void add_conv(const std::string& name, std::size_t in, std::size_t out, std::size_t k, std::size_t stride, bool relu) {
    Conv c{in, out, k, stride, param_count_, 0, relu};
    tensors_.push_back({name + ".weight", {out, in, k, k}, param_count_, out * in * k * k});
    param_count_ += out * in * k * k;
    c.bias = param_count_;
    tensors_.push_back({name + ".bias", {out}, param_count_, out});
    param_count_ += out;
    convs_.push_back(c);
  }

  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < convs_.size(); ++l) {
      const Conv& c = convs_[l];
      const double fan_in = static_cast<double>(c.in * c.k * c.k);
      // He scaling for ReLU layers; the linear head starts small.
      const double stddev = c.relu ? std::sqrt(2.0 / fan_in) : 0.1 / std::sqrt(fan_in);
      std::normal_distribution<double> dist(0.0, stddev);
      for (std::size_t i = 0; i < c.out * c.in * c.k * c.k; ++i) params_[c.weight + i] = static_cast<T>(dist(rng));
    }
  }

  NetShape shape_{};
  std::vector<Conv> convs_;
  std::vector<ParamTensor> tensors_;
  std::size_t param_count_ = 0;
  std::vector<T> params_;
};

}  // namespace awing::trainer
