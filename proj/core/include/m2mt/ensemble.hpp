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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "m2mt/lf_tensor.hpp"

namespace m2mt {

/// Dihedral transform acting jointly on the spatial and angular planes:
/// flip_x mirrors x and u, flip_y mirrors y and v, transpose swaps x with y
/// and u with v. apply() performs the flips first, then the transpose.
struct LfTransform {
  bool flip_x = false;
  bool flip_y = false;
  bool transpose = false;

  /// The transform equal to applying `b` first and then `a`.
  friend LfTransform compose(const LfTransform& a, const LfTransform& b);
  friend LfTransform invert(const LfTransform& t);
  friend bool operator==(const LfTransform&, const LfTransform&) = default;
};

LfTransform compose(const LfTransform& a, const LfTransform& b);
LfTransform invert(const LfTransform& t);
std::string to_string(const LfTransform& t);

/// The eight group elements, identity first.
std::array<LfTransform, 8> dihedral_group();

/// Transpose requires U == V and W == H.
template <class T>
LfTensor<T> apply(const LfTransform& t, const LfTensor<T>& lf);

template <class T>
using LfMap = std::function<LfTensor<T>(const LfTensor<T>&)>;

/// mean_i T_i^-1(f(T_i(lr))), accumulated in transform order as a running
/// mean m += (x - m) / k.
template <class T>
LfTensor<T> self_ensemble(const LfMap<T>& f, const LfTensor<T>& lr, std::span<const LfTransform> transforms);

}  // namespace m2mt
