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

#include <algorithm>
#include <random>

#include "m2mt/lf_tensor.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::random_lf;

TEST(LfTensor, OffsetFollowsUVWHCOrder) {
  LfTensor<int> lf(LfShape{2, 3, 4, 5, 2});
  EXPECT_EQ(lf.offset(1, 2, 3, 4, 1), ((((1 * 3 + 2) * 4 + 3) * 5 + 4) * 2 + 1));
  EXPECT_THROW(LfTensor<float>(Tensor<float>({2, 2, 2})), ShapeError);
}

TEST(LfTensor, ViewsRoundTripOverRandomDims) {
  std::mt19937_64 rng(17);
  const std::array<std::size_t, 4> pick{1, 2, 3, 5};
  for (int round = 0; round < 150; ++round) {
    const LfShape s{pick[rng() % 4], pick[rng() % 4], pick[rng() % 4], pick[rng() % 4], pick[rng() % 4]};
    const LfTensor<float> lf = random_lf<float>(s, rng());
    EXPECT_EQ(from_spatial(to_spatial(lf), s), lf);
    EXPECT_EQ(from_angular(to_angular(lf), s), lf);
    EXPECT_EQ(from_epi_h(to_epi_h(lf), s), lf);
    EXPECT_EQ(from_epi_v(to_epi_v(lf), s), lf);
    EXPECT_EQ(from_merged(to_merged(lf), s), lf);
    EXPECT_EQ(macpi_to_lf(to_macpi(lf), s), lf);
  }
}

TEST(LfTensor, ViewsPlaceEveryElementWhereTheFormulaSays) {
  const LfShape s{2, 3, 4, 5, 2};
  LfTensor<double> lf(s);
  for (std::size_t i = 0; i < lf.tensor().size(); ++i) lf.tensor()[i] = static_cast<double>(i);
  const auto sp = to_spatial(lf), an = to_angular(lf), eh = to_epi_h(lf), ev = to_epi_v(lf), me = to_merged(lf),
             mp = to_macpi(lf);
  EXPECT_EQ(sp.dims(), (Dims{6, 20, 2}));
  EXPECT_EQ(an.dims(), (Dims{20, 6, 2}));
  EXPECT_EQ(eh.dims(), (Dims{15, 8, 2}));
  EXPECT_EQ(ev.dims(), (Dims{8, 15, 2}));
  EXPECT_EQ(me.dims(), (Dims{1, 20, 12}));
  EXPECT_EQ(mp.dims(), (Dims{10, 12, 2}));
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t x = 0; x < s.w; ++x)
        for (std::size_t y = 0; y < s.h; ++y)
          for (std::size_t c = 0; c < s.c; ++c) {
            const double e = lf(u, v, x, y, c);
            ASSERT_EQ(sp.at(u * s.v + v, x * s.h + y, c), e);
            ASSERT_EQ(an.at(x * s.h + y, u * s.v + v, c), e);
            ASSERT_EQ(eh.at(v * s.h + y, u * s.w + x, c), e);
            ASSERT_EQ(ev.at(u * s.w + x, v * s.h + y, c), e);
            ASSERT_EQ(me.at(0, x * s.h + y, (u * s.v + v) * s.c + c), e);
            ASSERT_EQ(mp.at(y * s.u + u, x * s.v + v, c), e);
          }
}

TEST(LfTensor, ViewsPreserveTheValueMultiset) {
  const LfTensor<double> lf = random_lf<double>({3, 2, 5, 3, 2}, 5);
  auto sorted = [](std::span<const double> d) {
    std::vector<double> v(d.begin(), d.end());
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto ref = sorted(lf.tensor().data());
  EXPECT_EQ(sorted(to_angular(lf).data()), ref);
  EXPECT_EQ(sorted(to_epi_h(lf).data()), ref);
  EXPECT_EQ(sorted(to_macpi(lf).data()), ref);
}

TEST(LfTensor, InverseViewsRejectWrongDims) {
  const LfShape s{2, 2, 3, 3, 1};
  const Tensor<float> wrong({4, 8, 1});
  EXPECT_THROW(from_spatial(wrong, s), ShapeError);
  EXPECT_THROW(from_angular(wrong, s), ShapeError);
  EXPECT_THROW(from_epi_h(wrong, s), ShapeError);
  EXPECT_THROW(from_epi_v(wrong, s), ShapeError);
  EXPECT_THROW(from_merged(wrong, s), ShapeError);
  EXPECT_THROW(macpi_to_lf(wrong, s), ShapeError);
}

}  // namespace
}  // namespace m2mt
