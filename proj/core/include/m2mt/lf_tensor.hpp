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

#include <array>
#include <cstddef>

#include "m2mt/tensor.hpp"

namespace m2mt {

/// Extents of a light field: angular (u, v), spatial (w, h), channels c.
struct LfShape {
  std::size_t u = 1;
  std::size_t v = 1;
  std::size_t w = 1;
  std::size_t h = 1;
  std::size_t c = 1;

  Dims dims() const { return {u, v, w, h, c}; }
  std::size_t views() const { return u * v; }
  std::size_t pixels() const { return w * h; }
  static LfShape from_dims(const Dims& dims);

  friend bool operator==(const LfShape&, const LfShape&) = default;
};

std::string to_string(const LfShape& s);

/// Light field stored as a (U, V, W, H, C) row-major tensor. Element
/// (u, v, x, y, ch) lives at flat offset ((((u*V + v)*W + x)*H + y)*C + ch);
/// x indexes the W axis and y the H axis.
template <class T>
class LfTensor {
 public:
  LfTensor() = default;
  explicit LfTensor(const LfShape& shape, T fill = T(0)) : shape_(shape), data_(shape.dims(), fill) {}
  explicit LfTensor(Tensor<T> data) : shape_(LfShape::from_dims(data.dims())), data_(std::move(data)) {}

  const LfShape& shape() const noexcept { return shape_; }
  const Tensor<T>& tensor() const& noexcept { return data_; }
  Tensor<T>& tensor() & noexcept { return data_; }
  Tensor<T> tensor() && { return std::move(data_); }

  std::size_t offset(std::size_t u, std::size_t v, std::size_t x, std::size_t y, std::size_t ch) const noexcept {
    return (((u * shape_.v + v) * shape_.w + x) * shape_.h + y) * shape_.c + ch;
  }
  T& operator()(std::size_t u, std::size_t v, std::size_t x, std::size_t y, std::size_t ch = 0) noexcept {
    return data_[offset(u, v, x, y, ch)];
  }
  const T& operator()(std::size_t u, std::size_t v, std::size_t x, std::size_t y,
                      std::size_t ch = 0) const noexcept {
    return data_[offset(u, v, x, y, ch)];
  }

  template <class U>
  LfTensor<U> cast() const {
    return LfTensor<U>(data_.template cast<U>());
  }

  friend bool operator==(const LfTensor&, const LfTensor&) = default;

 private:
  LfShape shape_;
  Tensor<T> data_;
};

// Axis orders over (u=0, v=1, x=2, y=3, c=4). Every subspace view is one of
// these permutations followed by a grouping reshape.
namespace view_order {
inline constexpr std::array<std::size_t, 5> kSpatial{0, 1, 2, 3, 4};
inline constexpr std::array<std::size_t, 5> kAngular{2, 3, 0, 1, 4};
inline constexpr std::array<std::size_t, 5> kEpiH{1, 3, 0, 2, 4};
inline constexpr std::array<std::size_t, 5> kEpiV{0, 2, 1, 3, 4};
inline constexpr std::array<std::size_t, 5> kMerged{2, 3, 0, 1, 4};
inline constexpr std::array<std::size_t, 5> kMacPi{3, 0, 2, 1, 4};
}  // namespace view_order

/// (U*V, W*H, C): tokens are the pixels of each sub-aperture image.
template <class T>
Tensor<T> to_spatial(const LfTensor<T>& lf);
template <class T>
LfTensor<T> from_spatial(const Tensor<T>& t, const LfShape& shape);

/// (W*H, U*V, C): tokens are the views at each pixel.
template <class T>
Tensor<T> to_angular(const LfTensor<T>& lf);
template <class T>
LfTensor<T> from_angular(const Tensor<T>& t, const LfShape& shape);

/// (V*H, U*W, C): slice (v, y), plane (u, x).
template <class T>
Tensor<T> to_epi_h(const LfTensor<T>& lf);
template <class T>
LfTensor<T> from_epi_h(const Tensor<T>& t, const LfShape& shape);

/// (U*W, V*H, C): slice (u, x), plane (v, y).
template <class T>
Tensor<T> to_epi_v(const LfTensor<T>& lf);
template <class T>
LfTensor<T> from_epi_v(const Tensor<T>& t, const LfShape& shape);

/// (1, W*H, U*V*C) with channel index (u*V + v)*C + ch, so the channels of one
/// view stay adjacent.
template <class T>
Tensor<T> to_merged(const LfTensor<T>& lf);
template <class T>
LfTensor<T> from_merged(const Tensor<T>& t, const LfShape& shape);

/// Macro-pixel image (U*H, V*W, C): MacPI[y*U + u, x*V + v, ch] = lf(u, v, x, y, ch).
template <class T>
Tensor<T> to_macpi(const LfTensor<T>& lf);
template <class T>
LfTensor<T> macpi_to_lf(const Tensor<T>& t, const LfShape& shape);

}  // namespace m2mt
