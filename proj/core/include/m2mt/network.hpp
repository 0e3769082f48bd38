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

#include <cstdint>
#include <string>
#include <vector>

#include "m2mt/lf_tensor.hpp"
#include "m2mt/m2mt.hpp"

namespace m2mt {

enum class FlopConvention {
  kTwoPerMac,  // one multiply-add counts as 2 FLOPs
  kMac,        // one multiply-add counts as 1
};

struct NetConfig {
  std::size_t u = 5;
  std::size_t v = 5;
  std::size_t c = 48;
  std::size_t c_cor = 128;
  std::size_t d = 128;
  std::size_t n1 = 4;
  std::size_t n2 = 8;
  std::size_t r = 4;
  bool norm = true;
  bool ffn = true;
  bool angular_ffn = false;
  bool out_proj = true;
  bool residual = true;
  std::size_t ffn_ratio = 2;
  std::uint64_t seed = 0;
  FlopConvention flop_convention = FlopConvention::kTwoPerMac;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  BlockOptions m2mt_options() const;
  BlockOptions angular_options() const;

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Transformer applied to each view on its own (tokens W*H, D = C). It has
/// no path between views.
template <class P>
struct O2oBlockT {
  std::size_t u = 1, v = 1, c = 1;
  bool residual = true;
  std::array<Conv2dT<P>, 2> pos_conv;
  std::optional<NormT<P>> norm1;
  AttentionT<P> attn;
  std::optional<NormT<P>> norm2;
  std::optional<FeedForwardT<P>> ffn;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    O2oBlockT<Q> r;
    r.u = u, r.v = v, r.c = c, r.residual = residual;
    r.pos_conv = {pos_conv[0].map(f), pos_conv[1].map(f)};
    r.norm1 = detail::map_optional(norm1, f);
    r.attn = attn.map(f);
    r.norm2 = detail::map_optional(norm2, f);
    r.ffn = detail::map_optional(ffn, f);
    return r;
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    visit_impl(*this, prefix, f);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    visit_impl(*this, prefix, f);
  }

 private:
  template <class Self, class F>
  static void visit_impl(Self& s, const std::string& prefix, F& f) {
    s.pos_conv[0].visit(prefix + ".pos_conv.0", f);
    s.pos_conv[1].visit(prefix + ".pos_conv.1", f);
    if (s.norm1) s.norm1->visit(prefix + ".norm1", f);
    s.attn.visit(prefix + ".attn", f);
    if (s.norm2) s.norm2->visit(prefix + ".norm2", f);
    if (s.ffn) s.ffn->visit(prefix + ".ffn", f);
  }
};

/// Head convolutions, a stack of blocks, and the upsampling tail.
template <class P, template <class> class Block>
struct SrNetworkT {
  NetConfig config;
  std::vector<Conv2dT<P>> head;  // 1 -> C, then C -> C; leaky ReLU between
  std::vector<Block<P>> blocks;
  Conv2dT<P> tail_expand;  // 1x1, C -> r*r*C
  Conv2dT<P> tail_out;     // 3x3, C -> 1 after pixel shuffle

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    SrNetworkT<Q, Block> r;
    r.config = config;
    for (const auto& h : head) r.head.push_back(h.map(f));
    for (const auto& b : blocks) r.blocks.push_back(b.map(f));
    r.tail_expand = tail_expand.map(f);
    r.tail_out = tail_out.map(f);
    return r;
  }
  /// Enumerates parameters as "head.0.kernel", "blocks.3.m2mt.encode.weight", ...
  template <class F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <class F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

 private:
  template <class Self, class F>
  static void visit_impl(Self& s, F& f) {
    for (std::size_t i = 0; i < s.head.size(); ++i) s.head[i].visit("head." + std::to_string(i), f);
    for (std::size_t i = 0; i < s.blocks.size(); ++i) s.blocks[i].visit("blocks." + std::to_string(i), f);
    s.tail_expand.visit("tail.expand", f);
    s.tail_out.visit("tail.out", f);
  }
};

template <class P>
using NetworkT = SrNetworkT<P, CorrelationBlockT>;
template <class P>
using O2OBaselineT = SrNetworkT<P, O2oBlockT>;

template <class T>
using Network = NetworkT<Tensor<T>>;
template <class T>
using O2OBaseline = O2OBaselineT<Tensor<T>>;

/// Glorot-uniform weights and kernels (pos_embed counts as a (U*V, C)
/// matrix), zero biases and offsets, unit gains. Values are drawn in visit
/// order from one mt19937_64 stream, so float and double builds agree after
/// rounding.
template <class T, class Net>
void init_glorot(Net& net, std::uint64_t seed);

/// Parameter shapes for `cfg` with zero weights and biases and unit gains.
template <class T>
Network<T> make_network(const NetConfig& cfg);
template <class T>
O2OBaseline<T> make_o2o(const NetConfig& cfg);

/// make_* followed by init_glorot(cfg.seed).
template <class T>
Network<T> build(const NetConfig& cfg);
template <class T>
O2OBaseline<T> build_o2o(const NetConfig& cfg);

/// Sets every parameter to zero (gains included).
template <class T, class Net>
void zero_parameters(Net& net) {
  net.visit([](const std::string&, Tensor<T>& t) { t.fill(T(0)); });
}

/// (U, V, W, H, 1) -> (U, V, rW, rH, 1): tail(blocks(head(lr))) plus the
/// per-view bicubic upsampling of lr.
template <class T>
Var<T> forward(const NetworkT<Var<T>>& net, const Var<T>& lr);
template <class T>
Var<T> forward_o2o(const O2OBaselineT<Var<T>>& net, const Var<T>& lr);

template <class T>
LfTensor<T> forward(const Network<T>& net, const LfTensor<T>& lr);
template <class T>
LfTensor<T> forward_o2o(const O2OBaseline<T>& net, const LfTensor<T>& lr);

template <class T>
Var<T> o2o_block_forward(const Var<T>& lf, const O2oBlockT<Var<T>>& b);

/// Per-view bicubic resize of a (U, V, W, H, C) light field; the x-first and
/// y-first separable passes are averaged (see resample_both_orders).
template <class T>
Var<T> resize_views(const Var<T>& lf, double scale);
template <class T>
LfTensor<T> resize_views(const LfTensor<T>& lf, double scale);

// ---------------------------------------------------------------------------
// Accounting.

struct ParamEntry {
  std::string name;
  Dims dims;
  std::size_t count = 0;
};

struct ParamReport {
  std::vector<ParamEntry> entries;  // registry order
  std::size_t total = 0;
  std::size_t head_tail = 0;
  std::vector<std::size_t> per_block;
};

template <class T, class Net>
ParamReport count_params(const Net& net) {
  ParamReport rep;
  net.visit([&](const std::string& name, const Tensor<T>& t) {
    rep.entries.push_back({name, t.dims(), t.size()});
    rep.total += t.size();
    if (name.rfind("blocks.", 0) == 0) {
      const std::size_t idx = std::stoul(name.substr(7, name.find('.', 7) - 7));
      if (rep.per_block.size() <= idx) rep.per_block.resize(idx + 1, 0);
      rep.per_block[idx] += t.size();
    } else {
      rep.head_tail += t.size();
    }
  });
  return rep;
}

/// Parameter totals of make_network(cfg).
ParamReport count_params(const NetConfig& cfg);

struct FlopEntry {
  std::string name;
  double flops = 0.0;
};

struct FlopReport {
  std::vector<FlopEntry> entries;
  double total = 0.0;
  double head_tail = 0.0;
  double per_block = 0.0;
};

/// Analytic FLOPs for one forward pass on a (U, V, w, h, 1) input. Under
/// kTwoPerMac: conv 2*Cout*Cin*kh*kw per output pixel and view, linear
/// 2*Din*Dout per token, attention 4*T*T*D plus 5*T*T for the softmax.
/// kMac halves the multiply-add terms and drops the softmax term.
/// Normalization, activations, pixel shuffle and the bicubic skip are not
/// counted.
FlopReport count_flops(const NetConfig& cfg, std::size_t w, std::size_t h);

}  // namespace m2mt
