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

#include "m2mt/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace m2mt {

template <class T>
Var<T> Var<T>::constant(Tensor<T> value) {
  auto node = std::make_shared<detail::Node<T>>();
  node->value = std::move(value);
  return Var(std::move(node));
}

template <class T>
Var<T> Tape<T>::leaf(Tensor<T> value) {
  auto node = std::make_shared<detail::Node<T>>();
  node->value = std::move(value);
  node->tape = this;
  node->index = nodes_.size();
  nodes_.push_back(node);
  return Var<T>(std::move(node));
}

template <class T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward) {
  Tape* tape = nullptr;
  for (const Var<T>& in : inputs) {
    if (!in.defined() || !in.requires_grad()) continue;
    if (tape && tape != in.tape()) throw std::logic_error("op mixes Vars from different tapes");
    tape = in.tape();
  }
  auto node = std::make_shared<detail::Node<T>>();
  node->value = std::move(value);
  if (!tape) return Var<T>(std::move(node));

  node->inputs.reserve(inputs.size());
  for (const Var<T>& in : inputs) node->inputs.push_back(in.node_);
  node->backward = std::move(backward);
  node->tape = tape;
  node->index = tape->nodes_.size();
  tape->nodes_.push_back(node);
  return Var<T>(std::move(node));
}

template <class T>
void Tape<T>::backward(const Var<T>& output, const Tensor<T>& seed) {
  if (!output.defined() || output.tape() != this) throw std::logic_error("backward: output is not on this tape");
  if (seed.dims() != output.dims()) {
    throw ShapeError("backward: seed dims " + to_string(seed.dims()) + " != output dims " +
                     to_string(output.dims()));
  }
  Tensor<T>& g = output.node_->ensure_grad();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += seed[i];

  std::vector<Tensor<T>*> input_grads;
  for (std::size_t i = output.node_->index + 1; i-- > 0;) {
    detail::Node<T>& node = *nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    input_grads.clear();
    for (const auto& in : node.inputs) {
      input_grads.push_back(in && in->tape ? &in->ensure_grad() : nullptr);
    }
    node.backward(node.grad, input_grads);
  }
}

template <class T>
void Tape<T>::backward(const Var<T>& output) {
  backward(output, Tensor<T>(output.dims(), T(1)));
}

template <class T>
void Tape<T>::zero_grad() {
  for (auto& node : nodes_) node->grad = Tensor<T>();
}

template <class T>
GradcheckReport gradcheck(const std::function<Var<T>(const Var<T>&)>& f, const Tensor<T>& point, T eps) {
  if (!(eps > T(0))) throw std::invalid_argument("gradcheck: eps must be > 0");

  Tape<T> tape;
  const Var<T> x = tape.leaf(point);
  const Var<T> y = f(x);
  tape.backward(y);
  const Tensor<T> analytic = x.grad();

  auto eval = [&](const Tensor<T>& at) {
    const Var<T> out = f(Var<T>::constant(at));
    double s = 0.0;
    for (T v : out.value().data()) s += static_cast<double>(v);
    return s;
  };

  GradcheckReport report;
  double max_abs_error = 0.0, max_abs_analytic = 0.0;
  Tensor<T> probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + eps;
    const double plus = eval(probe);
    probe[i] = point[i] - eps;
    const double minus = eval(probe);
    probe[i] = point[i];

    const double central = (plus - minus) / (2.0 * static_cast<double>(eps));
    const double a = static_cast<double>(analytic[i]);
    if (!std::isfinite(central) || !std::isfinite(a)) {
      report.finite = false;
      report.nonfinite_index = i;
      return report;
    }
    const double denom = std::max({std::abs(a), std::abs(central), 1e-8});
    const double err = std::abs(a - central) / denom;
    max_abs_error = std::max(max_abs_error, std::abs(a - central));
    max_abs_analytic = std::max(max_abs_analytic, std::abs(a));
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = i;
      report.worst_analytic = a;
      report.worst_numeric = central;
    }
  }
  report.scaled_error = max_abs_error / std::max(max_abs_analytic, 1e-8);
  return report;
}

template class Var<float>;
template class Var<double>;
template class Tape<float>;
template class Tape<double>;
template GradcheckReport gradcheck(const std::function<Var<float>(const Var<float>&)>&, const Tensor<float>&, float);
template GradcheckReport gradcheck(const std::function<Var<double>(const Var<double>&)>&, const Tensor<double>&,
                                   double);

}  // namespace m2mt
