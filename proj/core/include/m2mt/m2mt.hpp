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

// Many-to-many correlation block, the per-pixel angular Transformer and
// their composition.
//
// Light fields travel through the differentiable path as Var tensors of dims
// (U, V, W, H, C) in the LfTensor layout.

#include <array>
#include <optional>
#include <string>

#include "m2mt/lf_tensor.hpp"
#include "m2mt/ops.hpp"

namespace m2mt {

namespace detail {

template <class S, class F>
auto map_optional(const std::optional<S>& s, F& f) {
  using R = decltype(s->map(f));
  return s ? std::optional<R>(s->map(f)) : std::optional<R>();
}

}  // namespace detail

template <class P>
struct AttentionT {
  LinearT<P> q;
  LinearT<P> k;
  LinearT<P> v;
  std::optional<LinearT<P>> out;  // D -> model width

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return AttentionT<Q>{q.map(f), k.map(f), v.map(f), detail::map_optional(out, f)};
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
    s.q.visit(prefix + ".q", f);
    s.k.visit(prefix + ".k", f);
    s.v.visit(prefix + ".v", f);
    if (s.out) s.out->visit(prefix + ".out", f);
  }
};

template <class P>
struct FeedForwardT {
  LinearT<P> expand;
  LinearT<P> contract;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return FeedForwardT<Q>{expand.map(f), contract.map(f)};
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    expand.visit(prefix + ".expand", f);
    contract.visit(prefix + ".contract", f);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    expand.visit(prefix + ".expand", f);
    contract.visit(prefix + ".contract", f);
  }
};

/// Interior switches shared by the Transformer sub-blocks.
struct BlockOptions {
  bool norm = true;
  bool ffn = true;
  bool out_proj = true;
  bool residual = true;  // residual around attention and feed-forward
  std::size_t ffn_ratio = 2;
};

/// Correlation encode -> spatial self-attention -> correlation decode.
template <class P>
struct M2mtBlockT {
  std::size_t u = 1, v = 1, c = 1, c_cor = 1;
  bool residual = true;
  std::array<Conv2dT<P>, 2> pos_conv;  // C -> C, 3x3, per view
  LinearT<P> encode;                   // U*V*C -> C_Cor
  LinearT<P> decode;                   // C_Cor -> U*V*C
  std::optional<NormT<P>> norm1;
  AttentionT<P> attn;  // C_Cor -> D, out D -> C_Cor
  std::optional<NormT<P>> norm2;
  std::optional<FeedForwardT<P>> ffn;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    M2mtBlockT<Q> r;
    r.u = u, r.v = v, r.c = c, r.c_cor = c_cor, r.residual = residual;
    r.pos_conv = {pos_conv[0].map(f), pos_conv[1].map(f)};
    r.encode = encode.map(f);
    r.decode = decode.map(f);
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
    s.encode.visit(prefix + ".encode", f);
    if (s.norm1) s.norm1->visit(prefix + ".norm1", f);
    s.attn.visit(prefix + ".attn", f);
    if (s.norm2) s.norm2->visit(prefix + ".norm2", f);
    if (s.ffn) s.ffn->visit(prefix + ".ffn", f);
    s.decode.visit(prefix + ".decode", f);
  }
};

/// Vanilla Transformer over the U*V views of each pixel, D = C.
template <class P>
struct AngularBlockT {
  std::size_t u = 1, v = 1, c = 1;
  bool residual = true;
  P pos_embed;  // (U*V, C), added to the attention input
  std::optional<NormT<P>> norm1;
  AttentionT<P> attn;
  std::optional<NormT<P>> norm2;
  std::optional<FeedForwardT<P>> ffn;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    AngularBlockT<Q> r;
    r.u = u, r.v = v, r.c = c, r.residual = residual;
    r.pos_embed = f(pos_embed);
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
    f(prefix + ".pos_embed", s.pos_embed);
    if (s.norm1) s.norm1->visit(prefix + ".norm1", f);
    s.attn.visit(prefix + ".attn", f);
    if (s.norm2) s.norm2->visit(prefix + ".norm2", f);
    if (s.ffn) s.ffn->visit(prefix + ".ffn", f);
  }
};

template <class P>
struct CorrelationBlockT {
  M2mtBlockT<P> m2mt;
  AngularBlockT<P> angular;

  template <class F>
  auto map(F&& f) const {
    using Q = std::invoke_result_t<F&, const P&>;
    return CorrelationBlockT<Q>{m2mt.map(f), angular.map(f)};
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) {
    m2mt.visit(prefix + ".m2mt", f);
    angular.visit(prefix + ".angular", f);
  }
  template <class F>
  void visit(const std::string& prefix, F&& f) const {
    m2mt.visit(prefix + ".m2mt", f);
    angular.visit(prefix + ".angular", f);
  }
};

template <class T>
using M2mtBlock = M2mtBlockT<Tensor<T>>;
template <class T>
using AngularBlock = AngularBlockT<Tensor<T>>;
template <class T>
using CorrelationBlock = CorrelationBlockT<Tensor<T>>;

/// Converts stored parameters into untracked Vars.
template <class T, class S>
auto bind_constant(const S& params) {
  return params.map([](const Tensor<T>& t) { return t.empty() ? Var<T>() : Var<T>::constant(t); });
}

/// Records every stored parameter as a leaf of `tape`.
template <class T, class S>
auto bind_leaves(Tape<T>& tape, const S& params) {
  return params.map([&tape](const Tensor<T>& t) { return t.empty() ? Var<T>() : tape.leaf(t); });
}

/// Zero-initialized (gain one) parameter shapes; `init_glorot` fills them.
template <class T>
M2mtBlock<T> make_m2mt_block(std::size_t u, std::size_t v, std::size_t c, std::size_t c_cor, std::size_t d,
                             const BlockOptions& opt);
template <class T>
AngularBlock<T> make_angular_block(std::size_t u, std::size_t v, std::size_t c, const BlockOptions& opt);

// ---------------------------------------------------------------------------
// Forward passes. `lf` is (U, V, W, H, C).

/// (U, V, W, H, C) -> (W*H, C_Cor): per-pixel projection of all views.
template <class T>
Var<T> correlation_encode(const Var<T>& lf, const M2mtBlockT<Var<T>>& b);

/// Pre-norm spatial self-attention over the W*H correlation tokens with
/// output projection and residual as configured.
template <class T>
Var<T> spatial_self_attention(const Var<T>& i_cor, const M2mtBlockT<Var<T>>& b);

/// (W*H, C_Cor) -> (U, V, W, H, C).
template <class T>
Var<T> correlation_decode(const Var<T>& i_cor_hat, const M2mtBlockT<Var<T>>& b, const LfShape& shape);

/// lf' = lf + conv(lrelu(conv(lf))) per view; returns
/// lf' + decode(ffn(attn(encode(lf')))).
template <class T>
Var<T> m2mt_forward(const Var<T>& lf, const M2mtBlockT<Var<T>>& b);

/// Attention across the U*V views of every pixel independently.
template <class T>
Var<T> angular_forward(const Var<T>& lf, const AngularBlockT<Var<T>>& b);

/// angular(m2mt(lf)) + lf.
template <class T>
Var<T> correlation_block_forward(const Var<T>& lf, const CorrelationBlockT<Var<T>>& cb);

template <class T>
LfTensor<T> m2mt_forward(const LfTensor<T>& lf, const M2mtBlock<T>& b);
template <class T>
LfTensor<T> angular_forward(const LfTensor<T>& lf, const AngularBlock<T>& b);
template <class T>
LfTensor<T> correlation_block_forward(const LfTensor<T>& lf, const CorrelationBlock<T>& cb);

/// Shared Transformer pieces; x is (..., D).
template <class T>
Var<T> attention_sublayer(const Var<T>& x, const std::optional<NormT<Var<T>>>& norm, const AttentionT<Var<T>>& attn,
                          bool residual, const Var<T>& pos = Var<T>());
template <class T>
Var<T> ffn_sublayer(const Var<T>& x, const std::optional<NormT<Var<T>>>& norm, const FeedForwardT<Var<T>>& ffn,
                    bool residual);

}  // namespace m2mt
