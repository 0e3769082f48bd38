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

#include "m2mt/ensemble.hpp"

#include <stdexcept>

namespace m2mt {

// A transform reads in(phi(p)) with phi = F K, F the flips and K the optional
// swap. Composition and inversion follow from K F = F' K where F' has its
// two flips exchanged.
LfTransform compose(const LfTransform& a, const LfTransform& b) {
  LfTransform r;
  r.transpose = a.transpose != b.transpose;
  r.flip_x = (b.transpose ? a.flip_y : a.flip_x) != b.flip_x;
  r.flip_y = (b.transpose ? a.flip_x : a.flip_y) != b.flip_y;
  return r;
}

LfTransform invert(const LfTransform& t) {
  if (!t.transpose) return t;
  return {t.flip_y, t.flip_x, true};
}

std::string to_string(const LfTransform& t) {
  std::string s;
  if (t.flip_x) s += "flip_x+";
  if (t.flip_y) s += "flip_y+";
  if (t.transpose) s += "transpose+";
  if (s.empty()) return "identity";
  s.pop_back();
  return s;
}

std::array<LfTransform, 8> dihedral_group() {
  std::array<LfTransform, 8> g;
  for (std::size_t i = 0; i < 8; ++i) g[i] = {(i & 1) != 0, (i & 2) != 0, (i & 4) != 0};
  return g;
}

template <class T>
LfTensor<T> apply(const LfTransform& t, const LfTensor<T>& lf) {
  const LfShape s = lf.shape();
  if (t.transpose && (s.u != s.v || s.w != s.h)) {
    throw ShapeError("transpose needs U == V and W == H, got " + to_string(s));
  }
  LfTensor<T> out(s);
  auto flip = [](bool on, std::size_t i, std::size_t n) { return on ? n - 1 - i : i; };
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t x = 0; x < s.w; ++x)
        for (std::size_t y = 0; y < s.h; ++y) {
          // Source coordinates before the optional swap.
          const std::size_t su = t.transpose ? v : u, sv = t.transpose ? u : v;
          const std::size_t sx = t.transpose ? y : x, sy = t.transpose ? x : y;
          for (std::size_t ch = 0; ch < s.c; ++ch) {
            out(u, v, x, y, ch) =
                lf(flip(t.flip_x, su, s.u), flip(t.flip_y, sv, s.v), flip(t.flip_x, sx, s.w), flip(t.flip_y, sy, s.h), ch);
          }
        }
  return out;
}

template <class T>
LfTensor<T> self_ensemble(const LfMap<T>& f, const LfTensor<T>& lr, std::span<const LfTransform> transforms) {
  if (transforms.empty()) throw std::invalid_argument("self_ensemble: needs at least one transform");
  Tensor<T> mean;
  std::size_t k = 0;
  for (const LfTransform& t : transforms) {
    const LfTensor<T> member = apply(invert(t), f(apply(t, lr)));
    ++k;
    if (k == 1) {
      mean = member.tensor();
      continue;
    }
    if (member.tensor().dims() != mean.dims()) throw ShapeError("self_ensemble: member dims differ");
    const auto kt = static_cast<T>(k);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (member.tensor()[i] - mean[i]) / kt;
  }
  return LfTensor<T>(std::move(mean));
}

#define M2MT_INSTANTIATE_ENSEMBLE(T)                                   \
  template LfTensor<T> apply(const LfTransform&, const LfTensor<T>&); \
  template LfTensor<T> self_ensemble(const LfMap<T>&, const LfTensor<T>&, std::span<const LfTransform>);

M2MT_INSTANTIATE_ENSEMBLE(float)
M2MT_INSTANTIATE_ENSEMBLE(double)

}  // namespace m2mt
