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
#include <fstream>
#include <sstream>

#include "m2mt/config.hpp"
#include "m2mt/network.hpp"
#include "m2mt/weights_io.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::TempDir;
using testing::tiny_config;

// Parameter counts written out term by term for the default block layout.
std::size_t params_oracle(const NetConfig& c) {
  const std::size_t conv3 = 9 * c.c * c.c + c.c;
  const std::size_t head = (9 * c.c + c.c) + (c.n1 - 1) * conv3;
  const std::size_t tail = (c.c * c.r * c.r * c.c + c.r * c.r * c.c) + (9 * c.c + 1);
  const std::size_t merged = c.u * c.v * c.c;
  auto linear = [](std::size_t din, std::size_t dout) { return din * dout + dout; };
  const std::size_t f = c.ffn_ratio;

  std::size_t m2mt = 2 * conv3 + linear(merged, c.c_cor) + linear(c.c_cor, merged) + 3 * linear(c.c_cor, c.d);
  if (c.out_proj) m2mt += linear(c.d, c.c_cor);
  if (c.norm) m2mt += 2 * c.c_cor;
  if (c.ffn) m2mt += linear(c.c_cor, f * c.c_cor) + linear(f * c.c_cor, c.c_cor) + (c.norm ? 2 * c.c_cor : 0);

  std::size_t ang = c.u * c.v * c.c + 3 * linear(c.c, c.c);
  if (c.out_proj) ang += linear(c.c, c.c);
  if (c.norm) ang += 2 * c.c;
  if (c.angular_ffn) ang += linear(c.c, f * c.c) + linear(f * c.c, c.c) + (c.norm ? 2 * c.c : 0);
  return head + tail + c.n2 * (m2mt + ang);
}

TEST(Network, ParameterCountsMatchTermByTermOracle) {
  std::vector<NetConfig> cfgs(5);
  cfgs[1].norm = false;
  cfgs[2].ffn = false;
  cfgs[2].angular_ffn = true;
  cfgs[3].out_proj = false;
  cfgs[3].d = cfgs[3].c_cor;
  cfgs[4] = tiny_config(3, 2);
  for (const NetConfig& cfg : cfgs) {
    const ParamReport rep = count_params(cfg);
    EXPECT_EQ(rep.total, params_oracle(cfg));
    EXPECT_EQ(rep.per_block.size(), cfg.n2);
    std::size_t sum = rep.head_tail;
    for (std::size_t b : rep.per_block) sum += b;
    EXPECT_EQ(sum, rep.total);
  }
  EXPECT_EQ(count_params(NetConfig{}).total, 4047137u);
}

// FLOPs recomputed from the parameter tensors themselves: every weight or
// kernel element is one multiply-add per application.
double flops_oracle(const NetConfig& cfg, std::size_t w, std::size_t h) {
  const Network<float> net = make_network<float>(cfg);
  const double two = cfg.flop_convention == FlopConvention::kTwoPerMac ? 2.0 : 1.0;
  const double px = static_cast<double>(w * h), views = static_cast<double>(cfg.u * cfg.v);
  double total = 0.0;
  net.visit([&](const std::string& name, const Tensor<float>& t) {
    const std::string leaf = name.substr(name.rfind('.') + 1);
    if (leaf != "kernel" && leaf != "weight") return;
    double uses = 0.0;
    if (leaf == "kernel") {
      uses = px * views * (name.rfind("tail.out", 0) == 0 ? static_cast<double>(cfg.r * cfg.r) : 1.0);
    } else if (name.find(".m2mt.") != std::string::npos) {
      uses = px;
    } else {
      uses = px * views;
    }
    total += two * static_cast<double>(t.size()) * uses;
  });
  const double soft = two == 2.0 ? 5.0 : 0.0;
  const double n2 = static_cast<double>(cfg.n2);
  // Scores and weighted sum, then the softmax over the score matrix.
  total += n2 * (2.0 * two * px * px * static_cast<double>(cfg.d) + soft * px * px);
  total += n2 * px * (2.0 * two * views * views * static_cast<double>(cfg.c) + soft * views * views);
  return total;
}

TEST(Network, FlopCountsMatchParameterDrivenOracle) {
  std::vector<NetConfig> cfgs(4);
  cfgs[1].flop_convention = FlopConvention::kMac;
  cfgs[2].angular_ffn = true;
  cfgs[2].ffn = false;
  cfgs[3] = tiny_config(3, 3);
  for (const NetConfig& cfg : cfgs) {
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{32, 32}, {7, 5}}) {
      const double got = count_flops(cfg, w, h).total;
      EXPECT_NEAR(got / flops_oracle(cfg, w, h), 1.0, 1e-12);
    }
  }
}

TEST(Network, MacConventionHalvesMultiplyAddsAndDropsSoftmax) {
  NetConfig two;
  NetConfig mac;
  mac.flop_convention = FlopConvention::kMac;
  const double px = 32.0 * 32.0, views = 25.0;
  const double softmax = static_cast<double>(two.n2) * 5.0 * (px * px + px * views * views);
  EXPECT_NEAR((count_flops(two, 32, 32).total - softmax) / 2.0, count_flops(mac, 32, 32).total, 1.0);
  EXPECT_THROW(count_flops(two, 0, 4), std::invalid_argument);
}

TEST(Network, BlockFlopsAreLinearInDepth) {
  NetConfig a, b;
  a.n2 = 3;
  b.n2 = 4;
  const FlopReport ra = count_flops(a, 16, 16), rb = count_flops(b, 16, 16);
  EXPECT_DOUBLE_EQ(rb.total - ra.total, ra.per_block);
  EXPECT_DOUBLE_EQ(ra.head_tail, rb.head_tail);
}

TEST(Network, ValidationNamesTheField) {
  NetConfig cfg;
  cfg.c = 0;
  try {
    cfg.validate();
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("C"), std::string::npos);
  }
  cfg = NetConfig{};
  cfg.out_proj = false;
  cfg.d = 64;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.d = cfg.c_cor;
  EXPECT_NO_THROW(cfg.validate());
  cfg.r = 0;
  EXPECT_THROW(make_network<double>(cfg), std::invalid_argument);
}

TEST(Network, ZeroWeightsReduceToBicubicUpsampling) {
  Network<double> net = build<double>(tiny_config());
  zero_parameters<double>(net);
  const LfTensor<double> lr = testing::random_lf<double>({2, 2, 5, 6, 1}, 3);
  const LfTensor<double> sr = forward(net, lr);
  EXPECT_EQ(sr.shape(), (LfShape{2, 2, 10, 12, 1}));
  EXPECT_EQ(sr.tensor(), resize_views(lr, 2.0).tensor());
}

TEST(Network, ForwardRejectsMismatchedInputs) {
  const Network<double> net = build<double>(tiny_config());
  EXPECT_THROW(forward(net, LfTensor<double>(LfShape{3, 2, 4, 4, 1})), ShapeError);
  EXPECT_THROW(forward(net, LfTensor<double>(LfShape{2, 2, 4, 4, 2})), ShapeError);
}

TEST(Network, GlorotInitIsBoundedAndDeterministic) {
  const NetConfig cfg = tiny_config();
  const Network<double> a = build<double>(cfg), b = build<double>(cfg);
  NetConfig other = cfg;
  other.seed = cfg.seed + 1;
  const Network<double> c = build<double>(other);
  const Network<float> f = build<float>(cfg);

  std::vector<const Tensor<double>*> pa, pb, pc;
  std::vector<const Tensor<float>*> pf;
  a.visit([&](const std::string&, const Tensor<double>& t) { pa.push_back(&t); });
  b.visit([&](const std::string&, const Tensor<double>& t) { pb.push_back(&t); });
  c.visit([&](const std::string&, const Tensor<double>& t) { pc.push_back(&t); });
  f.visit([&](const std::string&, const Tensor<float>& t) { pf.push_back(&t); });

  bool any_differs = false;
  std::size_t i = 0;
  a.visit([&](const std::string& name, const Tensor<double>& t) {
    const std::string leaf = name.substr(name.rfind('.') + 1);
    EXPECT_EQ(t, *pb[i]) << name;
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_EQ(static_cast<float>(t[k]), (*pf[i])[k]) << name;
    if (leaf == "bias" || leaf == "offset") {
      for (double x : t.data()) EXPECT_EQ(x, 0.0) << name;
    } else if (leaf == "gain") {
      for (double x : t.data()) EXPECT_EQ(x, 1.0) << name;
    } else {
      double fan_in, fan_out;
      if (leaf == "kernel") {
        fan_in = static_cast<double>(t.dim(1) * t.dim(2) * t.dim(3));
        fan_out = static_cast<double>(t.dim(0) * t.dim(2) * t.dim(3));
      } else {
        fan_in = static_cast<double>(t.dim(0));
        fan_out = static_cast<double>(t.dim(1));
      }
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      double mx = 0.0;
      for (double x : t.data()) mx = std::max(mx, std::abs(x));
      EXPECT_LE(mx, limit) << name;
      if (t.size() >= 20) {
        EXPECT_GT(mx, 0.5 * limit) << name;
      }
      any_differs |= t != *pc[i];
    }
    ++i;
  });
  EXPECT_TRUE(any_differs);
}

TEST(Config, ParsesKeysCommentsAndDefaults) {
  const NetConfig cfg = parse_config(
      "# toy\n"
      "U = 3\nV=4\n  C=16 \nC_Cor=32\nD=24\nn1=2\nr=2\nnorm=off\nffn=0\nangular_ffn=true\n"
      "out_proj=1\nresidual=on\nffn_ratio=3\nseed=99\nflop_convention=mac\n\n");
  EXPECT_EQ(cfg.u, 3u);
  EXPECT_EQ(cfg.v, 4u);
  EXPECT_EQ(cfg.c, 16u);
  EXPECT_EQ(cfg.c_cor, 32u);
  EXPECT_EQ(cfg.d, 24u);
  EXPECT_EQ(cfg.n1, 2u);
  EXPECT_EQ(cfg.n2, 9u);  // follows r = 2
  EXPECT_FALSE(cfg.norm);
  EXPECT_FALSE(cfg.ffn);
  EXPECT_TRUE(cfg.angular_ffn);
  EXPECT_EQ(cfg.ffn_ratio, 3u);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.flop_convention, FlopConvention::kMac);
  EXPECT_EQ(parse_config("r=4\n").n2, 8u);
  EXPECT_EQ(parse_config("r=2\nn2=3\n").n2, 3u);
  EXPECT_EQ(parse_config(""), NetConfig{});
}

TEST(Config, RejectsBadInputWithLocation) {
  for (const char* bad : {"bogus=1\n", "C=1\nC=2\n", "C=abc\n", "C\n", "norm=maybe\n", "C=0\n",
                          "flop_convention=flops\n", "C=-3\n"}) {
    EXPECT_THROW(parse_config(bad, "f.cfg"), std::invalid_argument) << bad;
  }
  try {
    parse_config("U=5\n\nbogus=1\n", "f.cfg");
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("f.cfg:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config("/nonexistent/m2mt.cfg"), IoError);
}

TEST(Config, FormatRoundTrips) {
  NetConfig cfg = tiny_config(3, 2);
  cfg.norm = false;
  cfg.angular_ffn = true;
  cfg.flop_convention = FlopConvention::kMac;
  cfg.seed = 123456789012345ull;
  EXPECT_EQ(parse_config(format_config(cfg)), cfg);
  EXPECT_EQ(parse_config(format_config(NetConfig{})), NetConfig{});
}

TEST(Weights, RoundTripAndInferConfig) {
  TempDir dir("weights");
  NetConfig cfg = tiny_config(3, 2);
  cfg.angular_ffn = true;
  const Network<double> net = build<double>(cfg);
  save_weights<double>(dir / "w.m2mw", net);
  const WeightFile file = read_weights(dir / "w.m2mw");
  NetKind kind = NetKind::kO2o;
  const NetConfig inferred = infer_config(file, 3, 2, &kind, cfg);
  EXPECT_EQ(kind, NetKind::kM2mt);
  EXPECT_EQ(inferred, cfg);
  const Network<double> back = load_network<double>(file, inferred);
  std::vector<Tensor<double>> want;
  net.visit([&](const std::string&, const Tensor<double>& t) { want.push_back(t); });
  std::size_t i = 0;
  back.visit([&](const std::string& name, const Tensor<double>& t) { EXPECT_EQ(t, want[i++]) << name; });
  EXPECT_EQ(i, want.size());

  // Conversion to float on load.
  const Network<float> f = load_network<float>(file, inferred);
  i = 0;
  f.visit([&](const std::string&, const Tensor<float>& t) {
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_EQ(t[k], static_cast<float>(want[i][k]));
    ++i;
  });
}

TEST(Weights, InfersBaselineAndVariants) {
  TempDir dir("weights_o2o");
  NetConfig cfg = tiny_config();
  cfg.r = 3;
  const O2OBaseline<float> o2o = build_o2o<float>(cfg);
  save_weights<float>(dir / "o.m2mw", o2o);
  NetKind kind = NetKind::kM2mt;
  const WeightFile file = read_weights(dir / "o.m2mw");
  const NetConfig got = infer_config(file, 2, 2, &kind, cfg);
  EXPECT_EQ(kind, NetKind::kO2o);
  EXPECT_EQ(got.r, 3u);
  EXPECT_EQ(got.c, cfg.c);
  EXPECT_NO_THROW(load_o2o<float>(file, got));

  NetConfig lean = tiny_config();
  lean.norm = false;
  lean.ffn = false;
  lean.out_proj = false;
  lean.d = lean.c_cor;
  save_weights<double>(dir / "l.m2mw", build<double>(lean));
  EXPECT_EQ(infer_config(read_weights(dir / "l.m2mw"), 2, 2, nullptr, lean), lean);
}

TEST(Weights, RejectsMismatches) {
  TempDir dir("weights_bad");
  const Network<double> net = build<double>(tiny_config());
  save_weights<double>(dir / "w.m2mw", net);
  const WeightFile file = read_weights(dir / "w.m2mw");
  EXPECT_THROW(infer_config(file, 3, 3), FormatError);
  NetConfig wider = tiny_config();
  wider.c = 4;
  EXPECT_ANY_THROW(load_network<double>(file, wider));

  std::ofstream(dir / "junk.m2mw") << "M2MW0 not a weight file";
  EXPECT_THROW(read_weights(dir / "junk.m2mw"), FormatError);
  EXPECT_THROW(read_weights(dir / "missing.m2mw"), IoError);

  std::stringstream empty;
  write_weights<double>(empty, {});
  EXPECT_THROW(infer_config(read_weights(empty), 2, 2), FormatError);
}

}  // namespace
}  // namespace m2mt
