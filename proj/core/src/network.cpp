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

#include "m2mt/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace m2mt {

void NetConfig::validate() const {
  auto positive = [](std::size_t n, const char* name) {
    if (n == 0) throw std::invalid_argument(std::string("config: ") + name + " must be >= 1");
  };
  positive(u, "U");
  positive(v, "V");
  positive(c, "C");
  positive(c_cor, "C_Cor");
  positive(d, "D");
  positive(n1, "n1");
  positive(n2, "n2");
  positive(r, "r");
  positive(ffn_ratio, "ffn_ratio");
  if (!out_proj && d != c_cor) {
    throw std::invalid_argument("config: out_proj=0 requires D == C_Cor");
  }
}

BlockOptions NetConfig::m2mt_options() const { return {norm, ffn, out_proj, residual, ffn_ratio}; }

BlockOptions NetConfig::angular_options() const { return {norm, angular_ffn, out_proj, residual, ffn_ratio}; }

namespace {

template <class T>
Conv2dParams<T> zero_conv(std::size_t cin, std::size_t cout, std::size_t k) {
  return {Tensor<T>({cout, cin, k, k}), Tensor<T>({cout})};
}

template <class T, template <class> class B>
void make_frame(SrNetworkT<Tensor<T>, B>& net, const NetConfig& cfg) {
  cfg.validate();
  net.config = cfg;
  net.head.push_back(zero_conv<T>(1, cfg.c, 3));
  for (std::size_t i = 1; i < cfg.n1; ++i) net.head.push_back(zero_conv<T>(cfg.c, cfg.c, 3));
  net.tail_expand = zero_conv<T>(cfg.c, cfg.r * cfg.r * cfg.c, 1);
  net.tail_out = zero_conv<T>(cfg.c, 1, 3);
}

std::string leaf_name(const std::string& name) { return name.substr(name.rfind('.') + 1); }

LfShape lf_shape_of(const Dims& d, const char* op) {
  if (d.size() != 5) throw ShapeError(std::string(op) + ": expected (U, V, W, H, C), got " + to_string(d));
  return LfShape::from_dims(d);
}

template <class T, template <class> class B, class BlockFn>
Var<T> sr_forward(const SrNetworkT<Var<T>, B>& net, const Var<T>& lr, BlockFn block_fn, const char* op) {
  const NetConfig& cfg = net.config;
  const LfShape s = lf_shape_of(lr.dims(), op);
  if (s.c != 1) throw ShapeError(std::string(op) + ": input must have a single channel, got C=" + std::to_string(s.c));
  if (s.u != cfg.u || s.v != cfg.v) {
    throw ShapeError(std::string(op) + ": input has " + std::to_string(s.u) + "x" + std::to_string(s.v) +
                     " views, network expects " + std::to_string(cfg.u) + "x" + std::to_string(cfg.v));
  }
  Var<T> x = reshape(lr, Dims{s.views(), s.w, s.h, 1});
  for (std::size_t i = 0; i < net.head.size(); ++i) {
    if (i > 0) x = leaky_relu(x);
    x = conv2d_nhwc(x, net.head[i]);
  }
  Var<T> features = reshape(x, Dims{s.u, s.v, s.w, s.h, cfg.c});
  for (const auto& b : net.blocks) features = block_fn(features, b);

  x = conv2d_nhwc(reshape(features, Dims{s.views(), s.w, s.h, cfg.c}), net.tail_expand);
  x = conv2d_nhwc(pixel_shuffle_nhwc(x, cfg.r), net.tail_out);
  const Var<T> residual = reshape(x, Dims{s.u, s.v, s.w * cfg.r, s.h * cfg.r, 1});
  return add(residual, resize_views(lr, static_cast<double>(cfg.r)));
}

}  // namespace

template <class T, class Net>
void init_glorot(Net& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  net.visit([&](const std::string& name, Tensor<T>& t) {
    const std::string leaf = leaf_name(name);
    double fan_in = 0.0, fan_out = 0.0;
    if (leaf == "kernel") {
      const double taps = static_cast<double>(t.dim(2) * t.dim(3));
      fan_in = static_cast<double>(t.dim(1)) * taps;
      fan_out = static_cast<double>(t.dim(0)) * taps;
    } else if (leaf == "weight" || leaf == "pos_embed") {
      fan_in = static_cast<double>(t.dim(0));
      fan_out = static_cast<double>(t.dim(1));
    } else {
      t.fill(leaf == "gain" ? T(1) : T(0));
      return;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (T& w : t.data()) w = static_cast<T>((2.0 * uniform() - 1.0) * limit);
  });
}

template <class T>
Network<T> make_network(const NetConfig& cfg) {
  Network<T> net;
  make_frame(net, cfg);
  for (std::size_t i = 0; i < cfg.n2; ++i) {
    net.blocks.push_back({make_m2mt_block<T>(cfg.u, cfg.v, cfg.c, cfg.c_cor, cfg.d, cfg.m2mt_options()),
                          make_angular_block<T>(cfg.u, cfg.v, cfg.c, cfg.angular_options())});
  }
  return net;
}

template <class T>
O2OBaseline<T> make_o2o(const NetConfig& cfg) {
  O2OBaseline<T> net;
  make_frame(net, cfg);
  const BlockOptions opt = cfg.m2mt_options();
  for (std::size_t i = 0; i < cfg.n2; ++i) {
    // Same interior as the angular Transformer, minus the view embedding.
    AngularBlock<T> a = make_angular_block<T>(cfg.u, cfg.v, cfg.c, opt);
    O2oBlockT<Tensor<T>> b;
    b.u = cfg.u, b.v = cfg.v, b.c = cfg.c, b.residual = opt.residual;
    b.pos_conv = {zero_conv<T>(cfg.c, cfg.c, 3), zero_conv<T>(cfg.c, cfg.c, 3)};
    b.norm1 = std::move(a.norm1);
    b.attn = std::move(a.attn);
    b.norm2 = std::move(a.norm2);
    b.ffn = std::move(a.ffn);
    net.blocks.push_back(std::move(b));
  }
  return net;
}

template <class T>
Network<T> build(const NetConfig& cfg) {
  Network<T> net = make_network<T>(cfg);
  init_glorot<T>(net, cfg.seed);
  return net;
}

template <class T>
O2OBaseline<T> build_o2o(const NetConfig& cfg) {
  O2OBaseline<T> net = make_o2o<T>(cfg);
  init_glorot<T>(net, cfg.seed);
  return net;
}

template <class T>
Var<T> resize_views(const Var<T>& lf, double scale) {
  const LfShape s = lf_shape_of(lf.dims(), "resize_views");
  const ResampleTaps tx = cubic_taps(s.w, resized_extent(s.w, scale), scale);
  const ResampleTaps ty = cubic_taps(s.h, resized_extent(s.h, scale), scale);
  return resample_both_orders(lf, 2, tx, 3, ty);
}

template <class T>
LfTensor<T> resize_views(const LfTensor<T>& lf, double scale) {
  return LfTensor<T>(resize_views(Var<T>::constant(lf.tensor()), scale).value());
}

template <class T>
Var<T> o2o_block_forward(const Var<T>& lf, const O2oBlockT<Var<T>>& b) {
  const LfShape s = lf_shape_of(lf.dims(), "o2o_block_forward");
  if (s.u != b.u || s.v != b.v || s.c != b.c) {
    throw ShapeError("o2o_block_forward: light field " + to_string(s) + " does not match block");
  }
  const Var<T> views = reshape(lf, Dims{s.views(), s.w, s.h, s.c});
  const Var<T> local = conv2d_nhwc(leaky_relu(conv2d_nhwc(views, b.pos_conv[0])), b.pos_conv[1]);
  const Var<T> tokens = reshape(add(views, local), Dims{s.views(), s.pixels(), s.c});
  Var<T> z = attention_sublayer(tokens, b.norm1, b.attn, b.residual);
  if (b.ffn) z = ffn_sublayer(z, b.norm2, *b.ffn, b.residual);
  return add(reshape(z, s.dims()), lf);
}

template <class T>
Var<T> forward(const NetworkT<Var<T>>& net, const Var<T>& lr) {
  return sr_forward(
      net, lr, [](const Var<T>& f, const CorrelationBlockT<Var<T>>& b) { return correlation_block_forward(f, b); },
      "forward");
}

template <class T>
Var<T> forward_o2o(const O2OBaselineT<Var<T>>& net, const Var<T>& lr) {
  return sr_forward(
      net, lr, [](const Var<T>& f, const O2oBlockT<Var<T>>& b) { return o2o_block_forward(f, b); }, "forward_o2o");
}

template <class T>
LfTensor<T> forward(const Network<T>& net, const LfTensor<T>& lr) {
  return LfTensor<T>(forward(bind_constant<T>(net), Var<T>::constant(lr.tensor())).value());
}

template <class T>
LfTensor<T> forward_o2o(const O2OBaseline<T>& net, const LfTensor<T>& lr) {
  return LfTensor<T>(forward_o2o(bind_constant<T>(net), Var<T>::constant(lr.tensor())).value());
}

#define M2MT_INSTANTIATE_NETWORK(T)                                                  \
  template void init_glorot<T, Network<T>>(Network<T>&, std::uint64_t);              \
  template void init_glorot<T, O2OBaseline<T>>(O2OBaseline<T>&, std::uint64_t);      \
  template Network<T> make_network<T>(const NetConfig&);                             \
  template O2OBaseline<T> make_o2o<T>(const NetConfig&);                             \
  template Network<T> build<T>(const NetConfig&);                                    \
  template O2OBaseline<T> build_o2o<T>(const NetConfig&);                            \
  template Var<T> resize_views(const Var<T>&, double);                               \
  template LfTensor<T> resize_views(const LfTensor<T>&, double);                     \
  template Var<T> o2o_block_forward(const Var<T>&, const O2oBlockT<Var<T>>&);        \
  template Var<T> forward(const NetworkT<Var<T>>&, const Var<T>&);                   \
  template Var<T> forward_o2o(const O2OBaselineT<Var<T>>&, const Var<T>&);           \
  template LfTensor<T> forward(const Network<T>&, const LfTensor<T>&);               \
  template LfTensor<T> forward_o2o(const O2OBaseline<T>&, const LfTensor<T>&);

M2MT_INSTANTIATE_NETWORK(float)
M2MT_INSTANTIATE_NETWORK(double)

}  // namespace m2mt
