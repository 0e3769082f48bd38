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

// Define-by-run reverse-mode differentiation.
//
// A Var is a handle to a node holding a value and (lazily) a gradient of the
// same dims. Leaves created through Tape::leaf are recorded on that tape; an
// op whose inputs include any recorded Var is itself recorded, otherwise the
// result is a plain constant and nothing is retained. Tape::backward walks
// the recorded nodes once, in reverse recording order, which is a valid
// reverse topological order because inputs always exist before consumers.
//
// A tape and its Vars belong to a single thread.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "m2mt/tensor.hpp"

namespace m2mt {

template <class T>
class Tape;

namespace detail {

template <class T>
struct Node {
  using BackwardFn = std::function<void(const Tensor<T>& grad_out, std::span<Tensor<T>* const> input_grads)>;

  Tensor<T> value;
  Tensor<T> grad;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;
  Tape<T>* tape = nullptr;
  std::size_t index = 0;

  Tensor<T>& ensure_grad() {
    if (grad.empty()) grad = Tensor<T>(value.dims());
    return grad;
  }
};

}  // namespace detail

template <class T>
class Var {
 public:
  Var() = default;

  /// A value that is not tracked for gradients.
  static Var constant(Tensor<T> value);

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor<T>& value() const { return node_->value; }
  const Dims& dims() const { return node_->value.dims(); }
  /// Accumulated gradient; zeros until a backward pass reaches this Var.
  const Tensor<T>& grad() const { return node_->ensure_grad(); }
  bool requires_grad() const noexcept { return node_ && node_->tape; }
  Tape<T>* tape() const noexcept { return node_ ? node_->tape : nullptr; }
  /// Position on the owning tape (0 for constants).
  std::size_t id() const noexcept { return node_ ? node_->index : 0; }

 private:
  friend class Tape<T>;
  explicit Var(std::shared_ptr<detail::Node<T>> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node<T>> node_;
};

template <class T>
class Tape {
 public:
  using BackwardFn = typename detail::Node<T>::BackwardFn;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// A differentiable input recorded on this tape.
  Var<T> leaf(Tensor<T> value);

  /// Seeds `output` with `seed` and propagates vector-Jacobian products to
  /// every recorded node. Gradients accumulate across calls.
  void backward(const Var<T>& output, const Tensor<T>& seed);
  /// Seeds with ones.
  void backward(const Var<T>& output);

  void zero_grad();
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Builds the result of an op. When no input is recorded on a tape the
  /// result is a constant and `backward` is dropped. `backward` receives the
  /// output gradient and one pointer per input (null when that input does
  /// not need a gradient) to accumulate into.
  static Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);

 private:
  std::vector<std::shared_ptr<detail::Node<T>>> nodes_;
};

/// Result of comparing reverse-mode gradients with central differences.
struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  /// max_i |analytic_i - central_i| / max_i |analytic_i|; insensitive to
  /// roundoff on coordinates whose derivative is nearly zero.
  double scaled_error = 0.0;
  bool finite = true;
  /// First coordinate whose analytic or numeric derivative was not finite.
  std::size_t nonfinite_index = 0;

  bool passed(double tolerance) const { return finite && max_rel_error <= tolerance; }
};

/// Checks d(sum f(x))/dx at `point`. Per coordinate the error is
/// |analytic - central| / max(|analytic|, |central|, 1e-8).
template <class T>
GradcheckReport gradcheck(const std::function<Var<T>(const Var<T>&)>& f, const Tensor<T>& point, T eps);

}  // namespace m2mt
