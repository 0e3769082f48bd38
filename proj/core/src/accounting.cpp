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

namespace m2mt {

ParamReport count_params(const NetConfig& cfg) { return count_params<float>(make_network<float>(cfg)); }

FlopReport count_flops(const NetConfig& cfg, std::size_t w, std::size_t h) {
  cfg.validate();
  if (w == 0 || h == 0) throw std::invalid_argument("count_flops: patch extents must be >= 1");
  const bool two = cfg.flop_convention == FlopConvention::kTwoPerMac;
  const double mac = two ? 2.0 : 1.0;
  const double softmax = two ? 5.0 : 0.0;

  const double views = static_cast<double>(cfg.u * cfg.v);
  const double pixels = static_cast<double>(w * h);
  const double c = static_cast<double>(cfg.c);
  const double c_cor = static_cast<double>(cfg.c_cor);
  const double d = static_cast<double>(cfg.d);
  const double merged = views * c;
  const double ratio = static_cast<double>(cfg.ffn_ratio);
  const double r2 = static_cast<double>(cfg.r * cfg.r);

  // Multiply-adds of a stride-1 convolution over every view.
  auto conv = [&](double cin, double cout, double k, double px) { return mac * cout * cin * k * k * px * views; };
  // Self-attention over t tokens of width dk, repeated `batch` times.
  auto attn = [&](double t, double dk, double batch) { return batch * (2.0 * mac * t * t * dk + softmax * t * t); };

  FlopReport rep;
  auto add = [&rep](std::string name, double flops) { rep.entries.push_back({std::move(name), flops}); };

  double head = conv(1.0, c, 3.0, pixels) + conv(c, c, 3.0, pixels) * static_cast<double>(cfg.n1 - 1);
  add("head", head);

  add("block.m2mt.pos_conv", 2.0 * conv(c, c, 3.0, pixels));
  add("block.m2mt.encode", mac * merged * c_cor * pixels);
  add("block.m2mt.qkv", 3.0 * mac * c_cor * d * pixels);
  add("block.m2mt.attention", attn(pixels, d, 1.0));
  if (cfg.out_proj) add("block.m2mt.out", mac * d * c_cor * pixels);
  if (cfg.ffn) add("block.m2mt.ffn", 2.0 * mac * c_cor * ratio * c_cor * pixels);
  add("block.m2mt.decode", mac * c_cor * merged * pixels);
  add("block.angular.qkv", 3.0 * mac * c * c * views * pixels);
  add("block.angular.attention", attn(views, c, pixels));
  if (cfg.out_proj) add("block.angular.out", mac * c * c * views * pixels);
  if (cfg.angular_ffn) add("block.angular.ffn", 2.0 * mac * c * ratio * c * views * pixels);

  const double tail = conv(c, r2 * c, 1.0, pixels) + conv(c, 1.0, 3.0, pixels * r2);
  add("tail", tail);

  for (const FlopEntry& e : rep.entries) {
    if (e.name.rfind("block.", 0) == 0) rep.per_block += e.flops;
  }
  rep.head_tail = head + tail;
  rep.total = rep.head_tail + rep.per_block * static_cast<double>(cfg.n2);
  return rep;
}

}  // namespace m2mt
