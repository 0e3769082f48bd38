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

#include "m2mt/lf_tensor.hpp"

namespace m2mt {

LfShape LfShape::from_dims(const Dims& dims) {
  if (dims.size() != 5) throw ShapeError("light field tensors are 5-D, got " + to_string(dims));
  return {dims[0], dims[1], dims[2], dims[3], dims[4]};
}

std::string to_string(const LfShape& s) { return to_string(s.dims()); }

namespace {

using Order = std::array<std::size_t, 5>;

Dims permuted_dims(const LfShape& s, const Order& order) {
  const Dims d = s.dims();
  return {d[order[0]], d[order[1]], d[order[2]], d[order[3]], d[order[4]]};
}

template <class T>
Tensor<T> forward_view(const LfTensor<T>& lf, const Order& order, Dims grouped) {
  return permute(lf.tensor(), order).reshaped(std::move(grouped));
}

template <class T>
LfTensor<T> inverse_view(const Tensor<T>& t, const LfShape& shape, const Order& order, const Dims& grouped,
                         const char* name) {
  if (t.dims() != grouped) {
    throw ShapeError(std::string(name) + ": expected dims " + to_string(grouped) + ", got " + to_string(t.dims()));
  }
  const auto inv = inverse_permutation(order);
  return LfTensor<T>(permute(t.reshaped(permuted_dims(shape, order)), inv));
}

}  // namespace

template <class T>
Tensor<T> to_spatial(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return lf.tensor().reshaped({s.u * s.v, s.w * s.h, s.c});
}

template <class T>
LfTensor<T> from_spatial(const Tensor<T>& t, const LfShape& shape) {
  const Dims grouped{shape.u * shape.v, shape.w * shape.h, shape.c};
  if (t.dims() != grouped) throw ShapeError("from_spatial: expected dims " + to_string(grouped));
  return LfTensor<T>(t.reshaped(shape.dims()));
}

template <class T>
Tensor<T> to_angular(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return forward_view(lf, view_order::kAngular, {s.w * s.h, s.u * s.v, s.c});
}

template <class T>
LfTensor<T> from_angular(const Tensor<T>& t, const LfShape& s) {
  return inverse_view(t, s, view_order::kAngular, {s.w * s.h, s.u * s.v, s.c}, "from_angular");
}

template <class T>
Tensor<T> to_epi_h(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return forward_view(lf, view_order::kEpiH, {s.v * s.h, s.u * s.w, s.c});
}

template <class T>
LfTensor<T> from_epi_h(const Tensor<T>& t, const LfShape& s) {
  return inverse_view(t, s, view_order::kEpiH, {s.v * s.h, s.u * s.w, s.c}, "from_epi_h");
}

template <class T>
Tensor<T> to_epi_v(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return forward_view(lf, view_order::kEpiV, {s.u * s.w, s.v * s.h, s.c});
}

template <class T>
LfTensor<T> from_epi_v(const Tensor<T>& t, const LfShape& s) {
  return inverse_view(t, s, view_order::kEpiV, {s.u * s.w, s.v * s.h, s.c}, "from_epi_v");
}

template <class T>
Tensor<T> to_merged(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return forward_view(lf, view_order::kMerged, {1, s.w * s.h, s.u * s.v * s.c});
}

template <class T>
LfTensor<T> from_merged(const Tensor<T>& t, const LfShape& s) {
  return inverse_view(t, s, view_order::kMerged, {1, s.w * s.h, s.u * s.v * s.c}, "from_merged");
}

template <class T>
Tensor<T> to_macpi(const LfTensor<T>& lf) {
  const LfShape& s = lf.shape();
  return forward_view(lf, view_order::kMacPi, {s.h * s.u, s.w * s.v, s.c});
}

template <class T>
LfTensor<T> macpi_to_lf(const Tensor<T>& t, const LfShape& s) {
  return inverse_view(t, s, view_order::kMacPi, {s.h * s.u, s.w * s.v, s.c}, "macpi_to_lf");
}

#define M2MT_INSTANTIATE_VIEWS(T)                                          \
  template Tensor<T> to_spatial(const LfTensor<T>&);                       \
  template LfTensor<T> from_spatial(const Tensor<T>&, const LfShape&);     \
  template Tensor<T> to_angular(const LfTensor<T>&);                       \
  template LfTensor<T> from_angular(const Tensor<T>&, const LfShape&);     \
  template Tensor<T> to_epi_h(const LfTensor<T>&);                         \
  template LfTensor<T> from_epi_h(const Tensor<T>&, const LfShape&);       \
  template Tensor<T> to_epi_v(const LfTensor<T>&);                         \
  template LfTensor<T> from_epi_v(const Tensor<T>&, const LfShape&);       \
  template Tensor<T> to_merged(const LfTensor<T>&);                        \
  template LfTensor<T> from_merged(const Tensor<T>&, const LfShape&);      \
  template Tensor<T> to_macpi(const LfTensor<T>&);                         \
  template LfTensor<T> macpi_to_lf(const Tensor<T>&, const LfShape&);

M2MT_INSTANTIATE_VIEWS(float)
M2MT_INSTANTIATE_VIEWS(double)

}  // namespace m2mt
