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

#include "m2mt/training.hpp"

#include <cmath>

namespace m2mt {

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw std::invalid_argument("train: lr must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("train: betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("train: eps must be > 0");
  if (batch == 0) throw std::invalid_argument("train: batch must be >= 1");
}

template <class T>
TrainPair<T> make_pair(const LfTensor<T>& hr, std::size_t r) {
  const LfShape s = hr.shape();
  if (r == 0 || s.w % r != 0 || s.h % r != 0) {
    throw ShapeError("make_pair: HR extents " + std::to_string(s.w) + "x" + std::to_string(s.h) +
                     " are not divisible by r=" + std::to_string(r));
  }
  return {resize_views(hr, 1.0 / static_cast<double>(r)), hr};
}

template <class T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads, AdamState<T>& state,
               const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Tensor<T>* p : params) {
      state.m.emplace_back(p->dims());
      state.v.emplace_back(p->dims());
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: optimizer state does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = *grads[i];
    if (g.dims() != p.dims() || state.m[i].dims() != p.dims()) {
      throw ShapeError("adam_step: gradient " + std::to_string(i) + " has dims " + to_string(g.dims()) +
                       ", parameter has " + to_string(p.dims()));
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = static_cast<double>(g[k]);
      const double m = cfg.beta1 * static_cast<double>(state.m[i][k]) + (1.0 - cfg.beta1) * gk;
      const double v = cfg.beta2 * static_cast<double>(state.v[i][k]) + (1.0 - cfg.beta2) * gk * gk;
      state.m[i][k] = static_cast<T>(m);
      state.v[i][k] = static_cast<T>(v);
      const double update = cfg.lr * (m / c1) / (std::sqrt(v / c2) + cfg.eps);
      p[k] = static_cast<T>(static_cast<double>(p[k]) - update);
    }
  }
}

template <class T>
std::vector<double> train_toy(Network<T>& net, std::span<const TrainPair<T>> pairs, const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw std::invalid_argument("train_toy: needs at least one pair");
  const std::size_t batch = std::min(cfg.batch, pairs.size());

  std::vector<Tensor<T>*> params;
  net.visit([&](const std::string&, Tensor<T>& t) { params.push_back(&t); });

  AdamState<T> state;
  std::vector<double> curve;
  curve.reserve(cfg.iters);
  std::vector<Tensor<T>> grads;
  for (std::size_t it = 0; it < cfg.iters; ++it) {
    grads.clear();
    for (const Tensor<T>* p : params) grads.emplace_back(p->dims());
    double step_loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const TrainPair<T>& pair = pairs[(it * batch + b) % pairs.size()];
      Tape<T> tape;
      const NetworkT<Var<T>> bound = bind_leaves<T>(tape, net);
      const Var<T> sr = forward(bound, Var<T>::constant(pair.lr.tensor()));
      const Var<T> hr = Var<T>::constant(pair.hr.tensor());
      const Var<T> loss = cfg.loss == LossKind::kL1 ? l1_loss(sr, hr) : l2_loss(sr, hr);
      const double value = static_cast<double>(loss.value()[0]);
      if (!std::isfinite(value)) {
        throw DivergenceError("train_toy: loss became non-finite at iteration " + std::to_string(it));
      }
      step_loss += value;
      tape.backward(loss, Tensor<T>({1}, T(1) / static_cast<T>(batch)));
      std::size_t i = 0;
      bound.visit([&](const std::string&, const Var<T>& p) {
        const Tensor<T>& g = p.grad();
        Tensor<T>& acc = grads[i++];
        for (std::size_t k = 0; k < g.size(); ++k) acc[k] += g[k];
      });
    }
    curve.push_back(step_loss / static_cast<double>(batch));

    std::vector<const Tensor<T>*> gptr;
    for (const Tensor<T>& g : grads) {
      for (T x : g.data()) {
        if (!std::isfinite(static_cast<double>(x))) {
          throw DivergenceError("train_toy: gradient became non-finite at iteration " + std::to_string(it));
        }
      }
      gptr.push_back(&g);
    }
    adam_step<T>(params, gptr, state, cfg);
  }
  return curve;
}

#define M2MT_INSTANTIATE_TRAINING(T)                                                                          \
  template TrainPair<T> make_pair(const LfTensor<T>&, std::size_t);                                          \
  template void adam_step(std::span<Tensor<T>* const>, std::span<const Tensor<T>* const>, AdamState<T>&,    \
                          const TrainConfig&);                                                               \
  template std::vector<double> train_toy(Network<T>&, std::span<const TrainPair<T>>, const TrainConfig&);

M2MT_INSTANTIATE_TRAINING(float)
M2MT_INSTANTIATE_TRAINING(double)

}  // namespace m2mt
