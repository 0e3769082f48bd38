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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "m2mt/network.hpp"

namespace m2mt {

enum class LossKind { kL1, kL2 };

struct TrainConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch = 4;  // capped at the number of distinct pairs
  std::size_t iters = 300;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kL1;

  void validate() const;
};

/// Raised when a loss or gradient stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct TrainPair {
  LfTensor<T> lr;
  LfTensor<T> hr;
};

/// lr = per-view bicubic downsampling of hr by 1/r.
template <class T>
TrainPair<T> make_pair(const LfTensor<T>& hr, std::size_t r);

template <class T>
Var<T> l1_loss(const Var<T>& sr, const Var<T>& hr) {
  return mean_abs_diff(sr, hr);
}
template <class T>
Var<T> l2_loss(const Var<T>& sr, const Var<T>& hr) {
  return mean_sq_diff(sr, hr);
}

template <class T>
struct AdamState {
  std::size_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
};

/// One bias-corrected Adam update; state is sized on first use.
template <class T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads, AdamState<T>& state,
               const TrainConfig& cfg);

/// Runs cfg.iters steps of forward, loss, backward and Adam over `pairs`
/// (step s uses pairs s*batch, s*batch+1, ... modulo the pair count) and
/// returns the mean loss of each step, measured before its update.
template <class T>
std::vector<double> train_toy(Network<T>& net, std::span<const TrainPair<T>> pairs, const TrainConfig& cfg);

}  // namespace m2mt
