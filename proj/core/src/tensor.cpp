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

#include "m2mt/tensor.hpp"

#include <algorithm>

namespace m2mt {

std::size_t numel(const Dims& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

std::string to_string(const Dims& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

Dims strides_of(const Dims& dims) {
  Dims strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];
  return strides;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> axes) {
  std::vector<std::size_t> inv(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) inv.at(axes[i]) = i;
  return inv;
}

template <class T>
Tensor<T> permute(const Tensor<T>& in, std::span<const std::size_t> axes) {
  const std::size_t rank = in.rank();
  if (axes.size() != rank) throw ShapeError("permute: axis count does not match rank");
  std::vector<bool> seen(rank, false);
  for (std::size_t a : axes) {
    if (a >= rank || seen[a]) throw ShapeError("permute: axes are not a permutation");
    seen[a] = true;
  }

  Dims out_dims(rank);
  const Dims in_strides = strides_of(in.dims());
  Dims src_strides(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_dims[i] = in.dim(axes[i]);
    src_strides[i] = in_strides[axes[i]];
  }

  Tensor<T> out(out_dims);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t src = 0;
  const std::size_t n = out.size();
  // Odometer over the output; src tracks the matching input offset.
  for (std::size_t flat = 0; flat < n; ++flat) {
    out[flat] = in[src];
    for (std::size_t ax = rank; ax-- > 0;) {
      ++idx[ax];
      src += src_strides[ax];
      if (idx[ax] < out_dims[ax]) break;
      src -= src_strides[ax] * out_dims[ax];
      idx[ax] = 0;
    }
  }
  return out;
}

template Tensor<float> permute(const Tensor<float>&, std::span<const std::size_t>);
template Tensor<double> permute(const Tensor<double>&, std::span<const std::size_t>);

}  // namespace m2mt
