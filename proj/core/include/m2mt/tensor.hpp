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

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace m2mt {

using Dims = std::vector<std::size_t>;

/// Thrown when operand extents violate an operation's contract.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t numel(const Dims& dims);
std::string to_string(const Dims& dims);

/// Dense row-major array, last dimension fastest.
///
/// A default-constructed tensor is empty (rank 0, no storage). Every other
/// tensor has rank >= 1, all extents >= 1, and exactly numel(dims) elements.
template <class T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Dims dims, T fill = T(0)) : dims_(std::move(dims)) {
    validate_dims(dims_);
    data_.assign(numel(dims_), fill);
  }

  Tensor(Dims dims, std::vector<T> data) : dims_(std::move(dims)), data_(std::move(data)) {
    validate_dims(dims_);
    if (data_.size() != numel(dims_)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match dims " + to_string(dims_));
    }
  }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  T* ptr() noexcept { return data_.data(); }
  const T* ptr() const noexcept { return data_.data(); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  template <class... I>
  T& at(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  const T& at(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != dims_.size()) throw ShapeError("index rank mismatch for " + to_string(dims_));
    std::size_t off = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) {
      if (i >= dims_[axis]) throw ShapeError("index out of range for " + to_string(dims_));
      off = off * dims_[axis] + i;
      ++axis;
    }
    return off;
  }

  Tensor reshaped(Dims dims) const& {
    Tensor copy = *this;
    return std::move(copy).reshaped(std::move(dims));
  }
  Tensor reshaped(Dims dims) && {
    if (numel(dims) != data_.size()) {
      throw ShapeError("cannot reshape " + to_string(dims_) + " to " + to_string(dims));
    }
    validate_dims(dims);
    dims_ = std::move(dims);
    return std::move(*this);
  }

  template <class U>
  Tensor<U> cast() const {
    if (dims_.empty()) return {};
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(dims_, std::move(out));
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static void validate_dims(const Dims& dims) {
    if (dims.empty()) throw ShapeError("tensor rank must be >= 1");
    for (std::size_t d : dims) {
      if (d == 0) throw ShapeError("tensor extents must be >= 1, got " + to_string(dims));
    }
  }

  Dims dims_;
  std::vector<T> data_;
};

/// Row-major strides for `dims`.
Dims strides_of(const Dims& dims);

/// out.dims[i] == in.dims[axes[i]].
template <class T>
Tensor<T> permute(const Tensor<T>& in, std::span<const std::size_t> axes);

/// Inverse of a permutation given as an axis list.
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> axes);

}  // namespace m2mt
