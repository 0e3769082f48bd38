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
#include <limits>

#include "m2mt/training.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::smooth_lf;
using testing::tiny_config;

TEST(Adam, FirstTwoStepsMatchHandComputation) {
  Tensor<double> p({3}, std::vector<double>{1.0, -2.0, 0.5});
  const Tensor<double> g1({3}, std::vector<double>{0.3, -0.1, 0.0});
  const Tensor<double> g2({3}, std::vector<double>{-0.2, -0.4, 1.0});
  TrainConfig cfg;
  cfg.lr = 0.01;
  AdamState<double> st;
  Tensor<double>* ps[] = {&p};
  const Tensor<double>* gs1[] = {&g1};
  const Tensor<double>* gs2[] = {&g2};

  std::vector<double> want = {1.0, -2.0, 0.5}, m(3, 0.0), v(3, 0.0);
  for (int step = 1; step <= 2; ++step) {
    const Tensor<double>& g = step == 1 ? g1 : g2;
    adam_step<double>(ps, step == 1 ? std::span<const Tensor<double>* const>(gs1) : gs2, st, cfg);
    for (std::size_t k = 0; k < 3; ++k) {
      m[k] = 0.9 * m[k] + 0.1 * g[k];
      v[k] = 0.999 * v[k] + 0.001 * g[k] * g[k];
      const double mh = m[k] / (1.0 - std::pow(0.9, step)), vh = v[k] / (1.0 - std::pow(0.999, step));
      want[k] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
      EXPECT_NEAR(p[k], want[k], 1e-15) << "step " << step << " k " << k;
    }
  }
  EXPECT_EQ(st.step, 2u);
}

TEST(Adam, RejectsMismatchedShapes) {
  Tensor<double> p({3});
  const Tensor<double> g({4});
  Tensor<double>* ps[] = {&p};
  const Tensor<double>* gs[] = {&g};
  AdamState<double> st;
  EXPECT_THROW(adam_step<double>(ps, gs, st, TrainConfig{}), ShapeError);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.lr = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.batch = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.eps = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Pairs, DownsampleByR) {
  const LfTensor<double> hr = smooth_lf<double>({2, 2, 8, 12, 1});
  const TrainPair<double> p = make_pair(hr, 2);
  EXPECT_EQ(p.lr.shape(), (LfShape{2, 2, 4, 6, 1}));
  EXPECT_EQ(p.hr.tensor(), hr.tensor());
  EXPECT_EQ(p.lr.tensor(), resize_views(hr, 0.5).tensor());
  EXPECT_THROW(make_pair(hr, 3), ShapeError);
  EXPECT_THROW(make_pair(hr, 0), ShapeError);
}

TEST(TrainToy, ZeroLearningRateGivesAFlatCurve) {
  Network<double> net = build<double>(tiny_config());
  const std::vector<TrainPair<double>> pairs{make_pair(smooth_lf<double>({2, 2, 8, 8, 1}), 2)};
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.iters = 4;
  const std::vector<double> curve = train_toy<double>(net, pairs, cfg);
  ASSERT_EQ(curve.size(), 4u);
  for (double l : curve) EXPECT_EQ(l, curve[0]);
}

TEST(TrainToy, LossDecreasesAndRunsAreRepeatable) {
  const std::vector<TrainPair<float>> pairs{make_pair(smooth_lf<float>({2, 2, 8, 8, 1}), 2),
                                            make_pair(smooth_lf<float>({2, 2, 8, 8, 1}, 1.0), 2)};
  TrainConfig cfg;
  cfg.lr = 2e-3;
  cfg.iters = 40;
  cfg.batch = 2;
  Network<float> a = build<float>(tiny_config()), b = build<float>(tiny_config());
  const std::vector<double> ca = train_toy<float>(a, pairs, cfg);
  const std::vector<double> cb = train_toy<float>(b, pairs, cfg);
  EXPECT_EQ(ca, cb);
  EXPECT_LT(ca.back(), 0.5 * ca.front());
}

TEST(TrainToy, NonFiniteLossRaises) {
  Network<double> net = build<double>(tiny_config());
  TrainPair<double> pair = make_pair(smooth_lf<double>({2, 2, 8, 8, 1}), 2);
  pair.hr(0, 0, 1, 1) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg;
  cfg.iters = 2;
  EXPECT_THROW(train_toy<double>(net, std::span<const TrainPair<double>>(&pair, 1), cfg), DivergenceError);
  EXPECT_THROW(train_toy<double>(net, std::span<const TrainPair<double>>(), cfg), std::invalid_argument);
}

TEST(Losses, Values) {
  const Var<double> a = Var<double>::constant(Tensor<double>({2}, std::vector<double>{1.0, 3.0}));
  const Var<double> b = Var<double>::constant(Tensor<double>({2}, std::vector<double>{2.0, 0.0}));
  EXPECT_EQ(l1_loss(a, b).value()[0], 2.0);
  EXPECT_EQ(l2_loss(a, b).value()[0], 5.0);
}

}  // namespace
}  // namespace m2mt
