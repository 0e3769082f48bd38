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

#include "m2mt/ensemble.hpp"
#include "m2mt/network.hpp"
#include "test_support.hpp"

namespace m2mt {
namespace {

using testing::random_lf;

TEST(Dihedral, GroupStructure) {
  const auto g = dihedral_group();
  EXPECT_EQ(g[0], LfTransform{});
  for (const auto& a : g) {
    EXPECT_EQ(compose(invert(a), a), LfTransform{});
    EXPECT_EQ(compose(a, invert(a)), LfTransform{});
    for (const auto& b : g) {
      const LfTransform ab = compose(a, b);
      EXPECT_NE(std::find(g.begin(), g.end(), ab), g.end());
      for (const auto& c : g) EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    }
  }
}

TEST(Dihedral, ApplyComposesLikeTheGroup) {
  const LfTensor<double> lf = random_lf<double>({3, 3, 4, 4, 2}, 1);
  for (const auto& a : dihedral_group())
    for (const auto& b : dihedral_group())
      EXPECT_EQ(apply(compose(a, b), lf).tensor(), apply(a, apply(b, lf)).tensor()) << to_string(a) << " " << to_string(b);
}

TEST(Dihedral, ElementFormulas) {
  const LfShape s{2, 3, 4, 5, 1};
  const LfTensor<double> lf = random_lf<double>(s, 2);
  const LfTensor<double> fx = apply(LfTransform{true, false, false}, lf);
  const LfTensor<double> fy = apply(LfTransform{false, true, false}, lf);
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t x = 0; x < s.w; ++x)
        for (std::size_t y = 0; y < s.h; ++y) {
          EXPECT_EQ(fx(u, v, x, y), lf(s.u - 1 - u, v, s.w - 1 - x, y));
          EXPECT_EQ(fy(u, v, x, y), lf(u, s.v - 1 - v, x, s.h - 1 - y));
        }
  const LfTensor<double> sq = random_lf<double>({3, 3, 4, 4, 1}, 3);
  const LfTensor<double> t = apply(LfTransform{false, false, true}, sq);
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t v = 0; v < 3; ++v)
      for (std::size_t x = 0; x < 4; ++x)
        for (std::size_t y = 0; y < 4; ++y) EXPECT_EQ(t(u, v, x, y), sq(v, u, y, x));
  EXPECT_THROW(apply(LfTransform{false, false, true}, lf), ShapeError);
  EXPECT_EQ(to_string(LfTransform{}), "identity");
  EXPECT_EQ(to_string(LfTransform{true, false, true}), "flip_x+transpose");
}

TEST(SelfEnsemble, EquivariantMapIsReproducedExactly) {
  const LfTensor<double> lr = random_lf<double>({3, 3, 5, 5, 1}, 4);
  const LfMap<double> up = [](const LfTensor<double>& x) { return resize_views(x, 2.0); };
  const auto g = dihedral_group();
  const LfTensor<double> e = self_ensemble<double>(up, lr, g);
  EXPECT_EQ(e.tensor(), up(lr).tensor());
  const LfMap<double> id = [](const LfTensor<double>& x) { return x; };
  EXPECT_EQ(self_ensemble<double>(id, lr, g).tensor(), lr.tensor());
  EXPECT_THROW(self_ensemble<double>(id, lr, std::span<const LfTransform>{}), std::invalid_argument);
}

TEST(SelfEnsemble, IsTheMeanOfMembers) {
  const LfTensor<double> lr = random_lf<double>({2, 2, 4, 4, 1}, 5);
  // Not equivariant: adds a ramp along x.
  const LfMap<double> f = [](const LfTensor<double>& x) {
    LfTensor<double> y = x;
    const LfShape s = y.shape();
    for (std::size_t u = 0; u < s.u; ++u)
      for (std::size_t v = 0; v < s.v; ++v)
        for (std::size_t i = 0; i < s.w; ++i)
          for (std::size_t j = 0; j < s.h; ++j) y(u, v, i, j) += 0.1 * static_cast<double>(i);
    return y;
  };
  const std::array<LfTransform, 2> ts{LfTransform{}, LfTransform{true, false, false}};
  const LfTensor<double> e = self_ensemble<double>(f, lr, ts);
  const LfTensor<double> a = f(lr), b = apply(ts[1], f(apply(ts[1], lr)));
  for (std::size_t i = 0; i < e.tensor().size(); ++i)
    EXPECT_NEAR(e.tensor()[i], 0.5 * (a.tensor()[i] + b.tensor()[i]), 1e-15);
  // The ramp averages out to its mean, 0.15 for W = 4.
  for (std::size_t i = 0; i < e.tensor().size(); ++i) EXPECT_NEAR(e.tensor()[i], lr.tensor()[i] + 0.15, 1e-15);
}

}  // namespace
}  // namespace m2mt
