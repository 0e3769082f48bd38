// Copyright 2026 The m2mt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Differentiable kernels. Every op takes and returns Var<T>; plain Tensor
// overloads with the conventional channel-first layouts are provided for the
// ops that are used standalone.
//
// Reductions accumulate left to right in a fixed order, so results do not
// depend on scheduling.

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "m2mt/autodiff.hpp"
#include "m2mt/tensor.hpp"

namespace m2mt {

// ---------------------------------------------------------------------------
// Parameter records. P is Tensor<T> for storage and Var<T> once bound to a
// forward pass; `map` converts between the two and `visit` enumerates the
// slots in a fixed order under dotted names.

template <class P>
struct LinearT {
  P weight;  // (Din, Dout)
  P bias;    // (Dout)

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return LinearT<Q>{f(weight), f(bias)};
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

template <class P>
struct Conv2dT {
  P kernel;  // (Cout, Cin, kh, kw), kh and kw in {1, 3}
  P bias;    // (Cout)

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return Conv2dT<Q>{f(kernel), f(bias)};
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".kernel", kernel);
    f(prefix + ".bias", bias);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    f(prefix + ".kernel", kernel);
    f(prefix + ".bias", bias);
  }
};

template <class P>
struct NormT {
  P gain;
  P offset;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return NormT<Q>{f(gain), f(offset)};
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".gain", gain);
    f(prefix + ".offset", offset);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    f(prefix + ".gain", gain);
    f(prefix + ".offset", offset);
  }
};

template <class T>
using LinearParams = LinearT<Tensor<T>>;
template <class T>
using Conv2dParams = Conv2dT<Tensor<T>>;
template <class T>
using NormParams = NormT<Tensor<T>>;

// ---------------------------------------------------------------------------
// Elementwise and structural ops.

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> scale(const Var<T>& a, T s);
/// Adds `b` to every trailing block of `x`; b.dims must equal the trailing
/// dims of x.
template <class T>
Var<T> add_broadcast(const Var<T>& x, const Var<T>& b);
/// Sum of all elements, dims (1).
template <class T>
Var<T> sum(const Var<T>& a);
/// Mean of |a - b| over all elements, dims (1). d/da is sign(a - b)/N with
/// sign(0) = 0.
template <class T>
Var<T> mean_abs_diff(const Var<T>& a, const Var<T>& b);
/// Mean of (a - b)^2 over all elements, dims (1).
template <class T>
Var<T> mean_sq_diff(const Var<T>& a, const Var<T>& b);

template <class T>
Var<T> reshape(const Var<T>& x, Dims dims);
template <class T>
Var<T> permute(const Var<T>& x, std::span<const std::size_t> axes);

template <class T>
Var<T> leaky_relu(const Var<T>& x, T slope = T(0.1));
/// x * Phi(x) with the exact normal CDF.
template <class T>
Var<T> gelu(const Var<T>& x);

// ---------------------------------------------------------------------------
// Linear maps and convolutions.

/// x (..., Din) -> (..., Dout): out = x W + b along the last axis. `bias`
/// may be undefined.
template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias);
template <class T>
Var<T> linear(const Var<T>& x, const LinearT<Var<T>>& p) {
  return linear(x, p.weight, p.bias);
}

/// Channels-last convolution: x (N, S0, S1, Cin) -> (N, S0, S1, Cout),
/// stride 1, zero padding (k-1)/2, kernel (Cout, Cin, k0, k1) with k0 along
/// S0 and k1 along S1.
template <class T>
Var<T> conv2d_nhwc(const Var<T>& x, const Var<T>& kernel, const Var<T>& bias);
template <class T>
Var<T> conv2d_nhwc(const Var<T>& x, const Conv2dT<Var<T>>& p) {
  return conv2d_nhwc(x, p.kernel, p.bias);
}

/// out[n, s0*r + d0, s1*r + d1, c] = in[n, s0, s1, c*r*r + d0*r + d1].
template <class T>
Var<T> pixel_shuffle_nhwc(const Var<T>& x, std::size_t r);

// ---------------------------------------------------------------------------
// Attention and normalization.

/// Softmax over the last axis with max subtraction.
template <class T>
Var<T> softmax(const Var<T>& x);

/// Softmax(q k^T / sqrt(D)) v for q, k, v of dims (T, D) or (B, T, D); the
/// softmax runs over keys. q and k must share D; v must have as many rows
/// as k. The output has q's row count and v's width.
template <class T>
Var<T> attention(const Var<T>& q, const Var<T>& k, const Var<T>& v);

/// Per-token standardization over the last axis (biased variance, eps added
/// to the variance) followed by gain/offset.
template <class T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& offset, T eps = T(1e-5));
template <class T>
Var<T> layer_norm(const Var<T>& x, const NormT<Var<T>>& p) {
  return layer_norm(x, p.gain, p.offset);
}

// ---------------------------------------------------------------------------
// Separable cubic resampling.

/// Sparse 1-D resampling matrix: output i reads taps [offsets[i], offsets[i+1]).
struct ResampleTaps {
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> index;
  std::vector<double> weight;
  /// tie[t] is 1 when tap t is as far from the sample point as tap t-1;
  /// such a pair is added together before joining the running sum.
  std::vector<unsigned char> tie;
};

/// Cubic convolution (a = -0.5) taps for resizing `in_size` samples by
/// `scale` onto `out_size` samples. Sampling is center-aligned
/// (src = (i + 0.5) / scale - 0.5), borders replicate the edge sample, and
/// for scale < 1 the kernel is widened by 1/scale to antialias. Weights of
/// each output are normalized to sum to one. Taps run from nearest to
/// farthest, which makes resampling commute exactly with reversal of the
/// axis whenever the sample positions are exact.
ResampleTaps cubic_taps(std::size_t in_size, std::size_t out_size, double scale);

/// Cubic kernel with a = -0.5.
double cubic_kernel(double t);

/// Applies `taps` along `axis` of x.
template <class T>
Var<T> resample_axis(const Var<T>& x, std::size_t axis, const ResampleTaps& taps);

/// Mean of the two separable passes (a0 then a1, and a1 then a0), so that
/// swapping the two axes of the input swaps those of the output exactly.
template <class T>
Var<T> resample_both_orders(const Var<T>& x, std::size_t a0, const ResampleTaps& t0, std::size_t a1,
                            const ResampleTaps& t1);
/// Bicubic resize of the two spatial axes of channels-last x (N, S0, S1, C)
/// to (N, round(s*S0), round(s*S1), C), via resample_both_orders.
template <class T>
Var<T> bicubic_resize_nhwc(const Var<T>& x, double scale);

std::size_t resized_extent(std::size_t n, double scale);

// ---------------------------------------------------------------------------
// Plain-tensor entry points (channel-first layouts).

template <class T>
Tensor<T> linear(const Tensor<T>& x, const LinearParams<T>& p);
/// x (Cin, H, W) -> (Cout, H, W).
template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Conv2dParams<T>& p);
template <class T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);
template <class T>
Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v);
/// x (r*r*C, H, W) -> (C, r*H, r*W).
template <class T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::size_t r);
template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& offset);
template <class T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope = T(0.1));
template <class T>
Tensor<T> gelu(const Tensor<T>& x);
/// x (C, H, W) -> (C, round(s*H), round(s*W)).
template <class T>
Tensor<T> bicubic_resize(const Tensor<T>& x, double scale);

}  // namespace m2mt
