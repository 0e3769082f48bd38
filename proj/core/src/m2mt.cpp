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

#include "m2mt/m2mt.hpp"

namespace m2mt {

namespace {

template <class T>
LinearParams<T> zero_linear(std::size_t din, std::size_t dout) {
  return {Tensor<T>({din, dout}), Tensor<T>({dout})};
}

template <class T>
NormParams<T> unit_norm(std::size_t n) {
  return {Tensor<T>({n}, T(1)), Tensor<T>({n})};
}

template <class T>
Conv2dParams<T> zero_conv(std::size_t cin, std::size_t cout, std::size_t k) {
  return {Tensor<T>({cout, cin, k, k}), Tensor<T>({cout})};
}

template <class T>
AttentionT<Tensor<T>> zero_attention(std::size_t width, std::size_t d, bool out_proj) {
  if (!out_proj && d != width) {
    throw ShapeError("attention without output projection needs D == model width (" + std::to_string(d) +
                     " vs " + std::to_string(width) + ")");
  }
  AttentionT<Tensor<T>> a{zero_linear<T>(width, d), zero_linear<T>(width, d), zero_linear<T>(width, d), {}};
  if (out_proj) a.out = zero_linear<T>(d, width);
  return a;
}

void require_positive(std::size_t n, const char* what) {
  if (n == 0) throw ShapeError(std::string(what) + " must be >= 1");
}

LfShape lf_shape_of(const Dims& d, const char* op) {
  if (d.size() != 5) throw ShapeError(std::string(op) + ": expected (U, V, W, H, C), got " + to_string(d));
  return LfShape::from_dims(d);
}

void require_views(const LfShape& s, std::size_t u, std::size_t v, std::size_t c, const char* op) {
  if (s.u != u || s.v != v || s.c != c) {
    throw ShapeError(std::string(op) + ": light field " + to_string(s) + " does not match block U=" +
                     std::to_string(u) + " V=" + std::to_string(v) + " C=" + std::to_string(c));
  }
}

constexpr std::array<std::size_t, 5> kSwapPairs{2, 3, 0, 1, 4};

}  // namespace

template <class T>
M2mtBlock<T> make_m2mt_block(std::size_t u, std::size_t v, std::size_t c, std::size_t c_cor, std::size_t d,
                             const BlockOptions& opt) {
  require_positive(u, "U");
  require_positive(v, "V");
  require_positive(c, "C");
  require_positive(c_cor, "C_Cor");
  require_positive(d, "D");
  const std::size_t merged = u * v * c;
  M2mtBlock<T> b;
  b.u = u, b.v = v, b.c = c, b.c_cor = c_cor, b.residual = opt.residual;
  b.pos_conv = {zero_conv<T>(c, c, 3), zero_conv<T>(c, c, 3)};
  b.encode = zero_linear<T>(merged, c_cor);
  b.decode = zero_linear<T>(c_cor, merged);
  if (opt.norm) b.norm1 = unit_norm<T>(c_cor);
  b.attn = zero_attention<T>(c_cor, d, opt.out_proj);
  if (opt.ffn) {
    require_positive(opt.ffn_ratio, "ffn_ratio");
    if (opt.norm) b.norm2 = unit_norm<T>(c_cor);
    b.ffn = FeedForwardT<Tensor<T>>{zero_linear<T>(c_cor, opt.ffn_ratio * c_cor),
                                    zero_linear<T>(opt.ffn_ratio * c_cor, c_cor)};
  }
  return b;
}

template <class T>
AngularBlock<T> make_angular_block(std::size_t u, std::size_t v, std::size_t c, const BlockOptions& opt) {
  require_positive(u, "U");
  require_positive(v, "V");
  require_positive(c, "C");
  AngularBlock<T> b;
  b.u = u, b.v = v, b.c = c, b.residual = opt.residual;
  b.pos_embed = Tensor<T>({u * v, c});
  if (opt.norm) b.norm1 = unit_norm<T>(c);
  b.attn = zero_attention<T>(c, c, opt.out_proj);
  if (opt.ffn) {
    require_positive(opt.ffn_ratio, "ffn_ratio");
    if (opt.norm) b.norm2 = unit_norm<T>(c);
    b.ffn = FeedForwardT<Tensor<T>>{zero_linear<T>(c, opt.ffn_ratio * c), zero_linear<T>(opt.ffn_ratio * c, c)};
  }
  return b;
}

template <class T>
Var<T> attention_sublayer(const Var<T>& x, const std::optional<NormT<Var<T>>>& norm, const AttentionT<Var<T>>& attn,
                          bool residual, const Var<T>& pos) {
  Var<T> a = pos.defined() ? add_broadcast(x, pos) : x;
  if (norm) a = layer_norm(a, *norm);
  Var<T> y = attention(linear(a, attn.q), linear(a, attn.k), linear(a, attn.v));
  if (attn.out) y = linear(y, *attn.out);
  return residual ? add(x, y) : y;
}

template <class T>
Var<T> ffn_sublayer(const Var<T>& x, const std::optional<NormT<Var<T>>>& norm, const FeedForwardT<Var<T>>& ffn,
                    bool residual) {
  const Var<T> a = norm ? layer_norm(x, *norm) : x;
  const Var<T> y = linear(gelu(linear(a, ffn.expand)), ffn.contract);
  return residual ? add(x, y) : y;
}

template <class T>
Var<T> correlation_encode(const Var<T>& lf, const M2mtBlockT<Var<T>>& b) {
  const LfShape s = lf_shape_of(lf.dims(), "correlation_encode");
  require_views(s, b.u, b.v, b.c, "correlation_encode");
  const Var<T> merged = reshape(permute(lf, std::span<const std::size_t>(view_order::kMerged)),
                                Dims{s.pixels(), s.views() * s.c});
  return linear(merged, b.encode);
}

template <class T>
Var<T> spatial_self_attention(const Var<T>& i_cor, const M2mtBlockT<Var<T>>& b) {
  if (i_cor.value().rank() != 2 || i_cor.dims()[1] != b.c_cor) {
    throw ShapeError("spatial_self_attention: expected (W*H, " + std::to_string(b.c_cor) + "), got " +
                     to_string(i_cor.dims()));
  }
  return attention_sublayer(i_cor, b.norm1, b.attn, b.residual);
}

template <class T>
Var<T> correlation_decode(const Var<T>& i_cor_hat, const M2mtBlockT<Var<T>>& b, const LfShape& shape) {
  require_views(shape, b.u, b.v, b.c, "correlation_decode");
  if (i_cor_hat.value().rank() != 2 || i_cor_hat.dims()[0] != shape.pixels() || i_cor_hat.dims()[1] != b.c_cor) {
    throw ShapeError("correlation_decode: expected (" + std::to_string(shape.pixels()) + ", " +
                     std::to_string(b.c_cor) + "), got " + to_string(i_cor_hat.dims()));
  }
  const Var<T> tokens = reshape(linear(i_cor_hat, b.decode), Dims{shape.w, shape.h, shape.u, shape.v, shape.c});
  return permute(tokens, std::span<const std::size_t>(kSwapPairs));
}

template <class T>
Var<T> m2mt_forward(const Var<T>& lf, const M2mtBlockT<Var<T>>& b) {
  const LfShape s = lf_shape_of(lf.dims(), "m2mt_forward");
  require_views(s, b.u, b.v, b.c, "m2mt_forward");
  const Var<T> views = reshape(lf, Dims{s.views(), s.w, s.h, s.c});
  const Var<T> local = conv2d_nhwc(leaky_relu(conv2d_nhwc(views, b.pos_conv[0])), b.pos_conv[1]);
  const Var<T> lf1 = add(lf, reshape(local, s.dims()));

  Var<T> z = spatial_self_attention(correlation_encode(lf1, b), b);
  if (b.ffn) z = ffn_sublayer(z, b.norm2, *b.ffn, b.residual);
  return add(lf1, correlation_decode(z, b, s));
}

template <class T>
Var<T> angular_forward(const Var<T>& lf, const AngularBlockT<Var<T>>& b) {
  const LfShape s = lf_shape_of(lf.dims(), "angular_forward");
  require_views(s, b.u, b.v, b.c, "angular_forward");
  const Var<T> tokens =
      reshape(permute(lf, std::span<const std::size_t>(view_order::kAngular)), Dims{s.pixels(), s.views(), s.c});
  Var<T> z = attention_sublayer(tokens, b.norm1, b.attn, b.residual, b.pos_embed);
  if (b.ffn) z = ffn_sublayer(z, b.norm2, *b.ffn, b.residual);
  return permute(reshape(z, Dims{s.w, s.h, s.u, s.v, s.c}), std::span<const std::size_t>(kSwapPairs));
}

template <class T>
Var<T> correlation_block_forward(const Var<T>& lf, const CorrelationBlockT<Var<T>>& cb) {
  return add(angular_forward(m2mt_forward(lf, cb.m2mt), cb.angular), lf);
}

template <class T>
LfTensor<T> m2mt_forward(const LfTensor<T>& lf, const M2mtBlock<T>& b) {
  return LfTensor<T>(m2mt_forward(Var<T>::constant(lf.tensor()), bind_constant<T>(b)).value());
}

template <class T>
LfTensor<T> angular_forward(const LfTensor<T>& lf, const AngularBlock<T>& b) {
  return LfTensor<T>(angular_forward(Var<T>::constant(lf.tensor()), bind_constant<T>(b)).value());
}

template <class T>
LfTensor<T> correlation_block_forward(const LfTensor<T>& lf, const CorrelationBlock<T>& cb) {
  return LfTensor<T>(correlation_block_forward(Var<T>::constant(lf.tensor()), bind_constant<T>(cb)).value());
}

#define M2MT_INSTANTIATE_BLOCKS(T)                                                                                 \
  template M2mtBlock<T> make_m2mt_block<T>(std::size_t, std::size_t, std::size_t, std::size_t, std::size_t,        \
                                           const BlockOptions&);                                                   \
  template AngularBlock<T> make_angular_block<T>(std::size_t, std::size_t, std::size_t, const BlockOptions&);      \
  template Var<T> attention_sublayer(const Var<T>&, const std::optional<NormT<Var<T>>>&,                           \
                                     const AttentionT<Var<T>>&, bool, const Var<T>&);                              \
  template Var<T> ffn_sublayer(const Var<T>&, const std::optional<NormT<Var<T>>>&, const FeedForwardT<Var<T>>&,    \
                               bool);                                                                              \
  template Var<T> correlation_encode(const Var<T>&, const M2mtBlockT<Var<T>>&);                                    \
  template Var<T> spatial_self_attention(const Var<T>&, const M2mtBlockT<Var<T>>&);                                \
  template Var<T> correlation_decode(const Var<T>&, const M2mtBlockT<Var<T>>&, const LfShape&);                    \
  template Var<T> m2mt_forward(const Var<T>&, const M2mtBlockT<Var<T>>&);                                          \
  template Var<T> angular_forward(const Var<T>&, const AngularBlockT<Var<T>>&);                                    \
  template Var<T> correlation_block_forward(const Var<T>&, const CorrelationBlockT<Var<T>>&);                      \
  template LfTensor<T> m2mt_forward(const LfTensor<T>&, const M2mtBlock<T>&);                                      \
  template LfTensor<T> angular_forward(const LfTensor<T>&, const AngularBlock<T>&);                                \
  template LfTensor<T> correlation_block_forward(const LfTensor<T>&, const CorrelationBlock<T>&);

M2MT_INSTANTIATE_BLOCKS(float)
M2MT_INSTANTIATE_BLOCKS(double)

}  // namespace m2mt
