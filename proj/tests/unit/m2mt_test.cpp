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

#include <gtest/gtest.h>

#include <cmath>

#include "m2mt/m2mt.hpp"
#include "m2mt/network.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::random_lf;
using testing::random_tensor;

// Every parameter replaced by small random values so no path is dead.
template <class Net>
void randomize(Net& net, std::uint64_t seed) {
  net.visit([&](const std::string&, Tensor<double>& t) {
    t = random_tensor<double>(t.dims(), seed++, -0.3, 0.3);
  });
}

Network<double> random_net(const NetConfig& cfg) {
  Network<double> net = make_network<double>(cfg);
  randomize(net, 100);
  return net;
}

struct Probe {
  LfShape shape{3, 3, 4, 5, 3};
  std::size_t u0 = 1, v0 = 2, x0 = 2, y0 = 3;

  LfTensor<double> base() const { return random_lf<double>(shape, 7, -1.0, 1.0); }
  LfTensor<double> bumped() const {
    LfTensor<double> lf = base();
    lf(u0, v0, x0, y0, 1) += 0.5;
    return lf;
  }
};

// Positions (u, v, x, y) whose output moved when one input sample moved.
template <class F>
std::vector<std::array<std::size_t, 4>> touched(const Probe& p, F&& f) {
  const LfTensor<double> a = f(p.base()), b = f(p.bumped());
  std::vector<std::array<std::size_t, 4>> out;
  const LfShape s = a.shape();
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t x = 0; x < s.w; ++x)
        for (std::size_t y = 0; y < s.h; ++y) {
          bool moved = false;
          for (std::size_t c = 0; c < s.c; ++c) moved |= a(u, v, x, y, c) != b(u, v, x, y, c);
          if (moved) out.push_back({u, v, x, y});
        }
  return out;
}

NetConfig probe_config() {
  NetConfig cfg = testing::tiny_config(3, 3);
  cfg.c = 3;
  cfg.c_cor = 6;
  cfg.d = 4;
  return cfg;
}

TEST(M2mtBlock, ZeroParametersMakeTheCorrelationBlockDoubleItsInput) {
  NetConfig cfg = probe_config();
  Network<double> net = make_network<double>(cfg);
  zero_parameters<double>(net);
  const LfTensor<double> lf = Probe{}.base();
  const LfTensor<double> y = correlation_block_forward(lf, net.blocks[0]);
  for (std::size_t i = 0; i < lf.tensor().size(); ++i) EXPECT_EQ(y.tensor()[i], 2.0 * lf.tensor()[i]);
}

TEST(M2mtBlock, ReachesEveryViewAndPixel) {
  const Network<double> net = random_net(probe_config());
  const Probe p;
  const auto hits = touched(p, [&](const LfTensor<double>& lf) { return m2mt_forward(lf, net.blocks[0].m2mt); });
  EXPECT_EQ(hits.size(), p.shape.u * p.shape.v * p.shape.w * p.shape.h);
}

TEST(M2mtBlock, PathWithoutPositionalConvsStillMixesViews) {
  Network<double> net = random_net(probe_config());
  for (auto& conv : net.blocks[0].m2mt.pos_conv) {
    conv.kernel.fill(0.0);
    conv.bias.fill(0.0);
  }
  const Probe p;
  const auto hits = touched(p, [&](const LfTensor<double>& lf) { return m2mt_forward(lf, net.blocks[0].m2mt); });
  EXPECT_EQ(hits.size(), p.shape.u * p.shape.v * p.shape.w * p.shape.h);
}

TEST(AngularBlock, OnlyReachesTheSamePixel) {
  const Network<double> net = random_net(probe_config());
  const Probe p;
  const auto hits = touched(p, [&](const LfTensor<double>& lf) { return angular_forward(lf, net.blocks[0].angular); });
  EXPECT_EQ(hits.size(), p.shape.u * p.shape.v);
  for (const auto& h : hits) {
    EXPECT_EQ(h[2], p.x0);
    EXPECT_EQ(h[3], p.y0);
  }
}

TEST(O2oBlock, OnlyReachesTheSameView) {
  O2OBaseline<double> net = make_o2o<double>(probe_config());
  randomize(net, 200);
  const Probe p;
  const auto bound = bind_constant<double>(net.blocks[0]);
  const auto hits = touched(p, [&](const LfTensor<double>& lf) {
    return LfTensor<double>(o2o_block_forward(Var<double>::constant(lf.tensor()), bound).value());
  });
  EXPECT_EQ(hits.size(), p.shape.w * p.shape.h);
  for (const auto& h : hits) {
    EXPECT_EQ(h[0], p.u0);
    EXPECT_EQ(h[1], p.v0);
  }
}

TEST(M2mtBlock, StageShapes) {
  const NetConfig cfg = probe_config();
  const Network<double> net = random_net(cfg);
  const auto b = bind_constant<double>(net.blocks[0].m2mt);
  const Probe p;
  const Var<double> lf = Var<double>::constant(p.base().tensor());
  const Var<double> cor = correlation_encode(lf, b);
  EXPECT_EQ(cor.dims(), (Dims{p.shape.w * p.shape.h, cfg.c_cor}));
  const Var<double> att = spatial_self_attention(cor, b);
  EXPECT_EQ(att.dims(), cor.dims());
  EXPECT_EQ(correlation_decode(att, b, p.shape).dims(), p.shape.dims());
}

TEST(M2mtBlock, EncodeIsAPerPixelLinearMapOfAllViews) {
  const NetConfig cfg = probe_config();
  const Network<double> net = random_net(cfg);
  const M2mtBlock<double>& blk = net.blocks[0].m2mt;
  const Probe p;
  const LfTensor<double> lf = p.base();
  const Tensor<double> cor = correlation_encode(Var<double>::constant(lf.tensor()), bind_constant<double>(blk)).value();
  const LfShape s = p.shape;
  for (std::size_t x = 0; x < s.w; ++x)
    for (std::size_t y = 0; y < s.h; ++y)
      for (std::size_t j = 0; j < cfg.c_cor; ++j) {
        double acc = blk.encode.bias[j];
        for (std::size_t u = 0; u < s.u; ++u)
          for (std::size_t v = 0; v < s.v; ++v)
            for (std::size_t c = 0; c < s.c; ++c)
              acc += lf(u, v, x, y, c) * blk.encode.weight.at((u * s.v + v) * s.c + c, j);
        EXPECT_NEAR(cor.at(x * s.h + y, j), acc, 1e-13);
      }
}

TEST(M2mtBlock, RejectsZeroExtents) {
  EXPECT_THROW(make_m2mt_block<double>(0, 2, 3, 4, 4, BlockOptions{}), ShapeError);
  EXPECT_THROW(make_angular_block<double>(2, 2, 0, BlockOptions{}), ShapeError);
  BlockOptions no_out;
  no_out.out_proj = false;
  EXPECT_THROW(make_m2mt_block<double>(2, 2, 3, 4, 6, no_out), ShapeError);
}

TEST(M2mtBlock, OptionalPiecesFollowOptions) {
  BlockOptions opt;
  opt.norm = false;
  opt.ffn = false;
  opt.out_proj = false;
  const M2mtBlock<double> b = make_m2mt_block<double>(2, 2, 3, 4, 4, opt);
  EXPECT_FALSE(b.norm1.has_value());
  EXPECT_FALSE(b.ffn.has_value());
  EXPECT_FALSE(b.attn.out.has_value());
  const M2mtBlock<double> full = make_m2mt_block<double>(2, 2, 3, 4, 6, BlockOptions{});
  ASSERT_TRUE(full.attn.out.has_value());
  EXPECT_EQ(full.attn.out->weight.dims(), (Dims{6, 4}));
  EXPECT_EQ(full.ffn->expand.weight.dims(), (Dims{4, 8}));
}

}  // namespace
}  // namespace m2mt
