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

#include "m2mt/metrics.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

TEST(Metrics, PsnrKnownValues) {
  const Tensor<double> a({4, 4}, 0.2), b({4, 4}, 0.3);
  EXPECT_NEAR(mse(a, b), 0.01, 1e-15);
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-12);
  EXPECT_NEAR(psnr(a, b, 2.0), 20.0 + 20.0 * std::log10(2.0), 1e-12);
  EXPECT_EQ(psnr(a, a), kPsnrInfinity);
  EXPECT_THROW(psnr(a, Tensor<double>({4, 5})), ShapeError);
}

TEST(Metrics, SsimOfConstantImages) {
  const double ma = 0.3, mb = 0.6, c1 = 0.01 * 0.01;
  const Tensor<double> a({16, 16}, ma), b({16, 16}, mb);
  EXPECT_NEAR(ssim(a, b), (2 * ma * mb + c1) / (ma * ma + mb * mb + c1), 1e-12);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Metrics, SsimIsSymmetricBoundedAndSmallImageSafe) {
  const Tensor<double> a = testing::random_tensor<double>({20, 13}, 1, 0.0, 1.0);
  const Tensor<double> b = testing::random_tensor<double>({20, 13}, 2, 0.0, 1.0);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-14);
  EXPECT_LT(ssim(a, b), 0.5);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  const Tensor<double> s = testing::random_tensor<double>({5, 7}, 3, 0.0, 1.0);
  EXPECT_TRUE(std::isfinite(ssim(s, s)));
  EXPECT_NEAR(ssim(s, s), 1.0, 1e-12);
}

TEST(Metrics, LumaWeights) {
  const Tensor<double> r({1}, 1.0), g({1}, 0.0), b({1}, 0.0);
  EXPECT_NEAR(rgb_to_y(r, g, b)[0], 0.299, 1e-15);
  EXPECT_NEAR(rgb_to_y(g, r, b)[0], 0.587, 1e-15);
  EXPECT_NEAR(rgb_to_y(g, b, r)[0], 0.114, 1e-15);
  const Tensor<double> w({2, 2}, 0.5);
  const Tensor<double> gray = rgb_to_y(w, w, w);
  for (double y : gray.data()) EXPECT_NEAR(y, 0.5, 1e-15);
}

TEST(Metrics, PerViewReport) {
  const LfShape s{2, 3, 12, 12, 1};
  LfTensor<double> hr(s), sr(s);
  hr.tensor().fill(0.5);
  sr.tensor().fill(0.5);
  for (std::size_t x = 0; x < 12; ++x)
    for (std::size_t y = 0; y < 12; ++y) sr(1, 2, x, y) = 0.6;
  const MetricReport rep = lf_metrics(sr, hr);
  ASSERT_EQ(rep.psnr.size(), 6u);
  EXPECT_NEAR(rep.psnr[1 * 3 + 2], 20.0, 1e-9);
  EXPECT_EQ(rep.psnr[0], kPsnrInfinity);
  EXPECT_NEAR(rep.mse, 0.01 / 6.0, 1e-15);
  EXPECT_EQ(rep.ssim[0], 1.0);

  const std::string kv = format_kv(rep);
  EXPECT_NE(kv.find("psnr_u1_v2=20\n"), std::string::npos) << kv;
  EXPECT_NE(kv.find("psnr_u0_v0=inf\n"), std::string::npos) << kv;
  EXPECT_NE(kv.find("mean_psnr="), std::string::npos);
  EXPECT_NE(format_table(rep).find("20"), std::string::npos);
  EXPECT_THROW(lf_metrics(sr, LfTensor<double>(LfShape{2, 3, 12, 11, 1})), ShapeError);
}

TEST(Metrics, NumberFormatting) {
  EXPECT_EQ(format_number(4047137.0), "4.04714e+06");
  EXPECT_EQ(format_number(20.0), "20");
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(kPsnrInfinity), "inf");
}

}  // namespace
}  // namespace m2mt
