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

#include <cmath>
#include <numeric>

#include "m2mt/ops.hpp"

namespace m2mt {

namespace {

template <class T>
void softmax_row(const T* x, T* p, std::size_t n) {
  T m = x[0];
  for (std::size_t j = 1; j < n; ++j) m = std::max(m, x[j]);
  T s = T(0);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = std::exp(x[j] - m);
    s += p[j];
  }
  for (std::size_t j = 0; j < n; ++j) p[j] /= s;
}

// dx = p * (dp - <dp, p>)
template <class T>
void softmax_row_backward(const T* p, const T* dp, T* dx, std::size_t n) {
  T dot = T(0);
  for (std::size_t j = 0; j < n; ++j) dot += dp[j] * p[j];
  for (std::size_t j = 0; j < n; ++j) dx[j] += p[j] * (dp[j] - dot);
}

}  // namespace

template <class T>
Var<T> softmax(const Var<T>& x) {
  const Tensor<T>& xv = x.value();
  const std::size_t n = xv.dims().back();
  const std::size_t rows = xv.size() / n;
  Tensor<T> out(xv.dims());
  for (std::size_t r = 0; r < rows; ++r) softmax_row(xv.ptr() + r * n, out.ptr() + r * n, n);
  Tensor<T> saved = out;
  return Tape<T>::record(std::move(out), {x},
                         [saved = std::move(saved), rows, n](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                           if (!gi[0]) return;
                           for (std::size_t r = 0; r < rows; ++r) {
                             softmax_row_backward(saved.ptr() + r * n, g.ptr() + r * n, gi[0]->ptr() + r * n, n);
                           }
                         });
}

template <class T>
Var<T> attention(const Var<T>& q, const Var<T>& k, const Var<T>& v) {
  const Dims& qd = q.dims();
  const Dims& kd = k.dims();
  const Dims& vd = v.dims();
  if (qd.size() != kd.size() || qd.size() != vd.size() || (qd.size() != 2 && qd.size() != 3)) {
    throw ShapeError("attention: q, k, v must all be (T, D) or (B, T, D)");
  }
  const bool batched = qd.size() == 3;
  const std::size_t batch = batched ? qd[0] : 1;
  if (batched && (kd[0] != batch || vd[0] != batch)) throw ShapeError("attention: batch extents differ");
  const std::size_t tq = qd[qd.size() - 2];
  const std::size_t tk = kd[kd.size() - 2];
  const std::size_t d = qd.back();
  const std::size_t dv = vd.back();
  if (kd.back() != d) {
    throw ShapeError("attention: q width " + std::to_string(d) + " != k width " + std::to_string(kd.back()));
  }
  if (vd[vd.size() - 2] != tk) throw ShapeError("attention: v rows must equal k rows");

  const T scale_factor = T(1) / std::sqrt(static_cast<T>(d));
  Dims out_dims = vd;
  out_dims[out_dims.size() - 2] = tq;
  Tensor<T> out(out_dims);
  Tensor<T> probs({batch, tq, tk});
  std::vector<T> logits(tk);
  const T* pq = q.value().ptr();
  const T* pk = k.value().ptr();
  const T* pv = v.value().ptr();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* qb = pq + b * tq * d;
    const T* kb = pk + b * tk * d;
    const T* vb = pv + b * tk * dv;
    for (std::size_t i = 0; i < tq; ++i) {
      const T* qi = qb + i * d;
      for (std::size_t j = 0; j < tk; ++j) {
        const T* kj = kb + j * d;
        T s = T(0);
        for (std::size_t c = 0; c < d; ++c) s += qi[c] * kj[c];
        logits[j] = s * scale_factor;
      }
      T* p = probs.ptr() + (b * tq + i) * tk;
      softmax_row(logits.data(), p, tk);
      T* o = out.ptr() + (b * tq + i) * dv;
      for (std::size_t j = 0; j < tk; ++j) {
        const T w = p[j];
        const T* vj = vb + j * dv;
        for (std::size_t c = 0; c < dv; ++c) o[c] += w * vj[c];
      }
    }
  }

  return Tape<T>::record(
      std::move(out), {q, k, v},
      [q, k, v, probs = std::move(probs), batch, tq, tk, d, dv, scale_factor](const Tensor<T>& g,
                                                                              std::span<Tensor<T>* const> gi) {
        const T* pq = q.value().ptr();
        const T* pk = k.value().ptr();
        const T* pv = v.value().ptr();
        std::vector<T> dp(tk), ds(tk);
        for (std::size_t b = 0; b < batch; ++b) {
          const T* qb = pq + b * tq * d;
          const T* kb = pk + b * tk * d;
          const T* vb = pv + b * tk * dv;
          for (std::size_t i = 0; i < tq; ++i) {
            const T* p = probs.ptr() + (b * tq + i) * tk;
            const T* go = g.ptr() + (b * tq + i) * dv;
            if (gi[2]) {
              T* dvb = gi[2]->ptr() + b * tk * dv;
              for (std::size_t j = 0; j < tk; ++j) {
                T* dvj = dvb + j * dv;
                for (std::size_t c = 0; c < dv; ++c) dvj[c] += p[j] * go[c];
              }
            }
            if (!gi[0] && !gi[1]) continue;
            for (std::size_t j = 0; j < tk; ++j) {
              const T* vj = vb + j * dv;
              T s = T(0);
              for (std::size_t c = 0; c < dv; ++c) s += go[c] * vj[c];
              dp[j] = s;
              ds[j] = T(0);
            }
            softmax_row_backward(p, dp.data(), ds.data(), tk);
            for (std::size_t j = 0; j < tk; ++j) ds[j] *= scale_factor;
            if (gi[0]) {
              T* dqi = gi[0]->ptr() + (b * tq + i) * d;
              for (std::size_t j = 0; j < tk; ++j) {
                const T* kj = kb + j * d;
                for (std::size_t c = 0; c < d; ++c) dqi[c] += ds[j] * kj[c];
              }
            }
            if (gi[1]) {
              const T* qi = qb + i * d;
              T* dkb = gi[1]->ptr() + b * tk * d;
              for (std::size_t j = 0; j < tk; ++j) {
                T* dkj = dkb + j * d;
                for (std::size_t c = 0; c < d; ++c) dkj[c] += ds[j] * qi[c];
              }
            }
          }
        }
      });
}

template <class T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& offset, T eps) {
  const Tensor<T>& xv = x.value();
  const std::size_t n = xv.dims().back();
  if (gain.dims() != Dims{n} || offset.dims() != Dims{n}) {
    throw ShapeError("layer_norm: gain and offset must be (" + std::to_string(n) + ")");
  }
  const std::size_t rows = xv.size() / n;
  Tensor<T> out(xv.dims());
  Tensor<T> xhat(xv.dims());
  std::vector<T> inv_std(rows);
  const T* pg = gain.value().ptr();
  const T* po = offset.value().ptr();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = xv.ptr() + r * n;
    T mean = T(0);
    for (std::size_t j = 0; j < n; ++j) mean += xr[j];
    mean /= static_cast<T>(n);
    T var = T(0);
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<T>(n);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    T* hr = xhat.ptr() + r * n;
    T* o = out.ptr() + r * n;
    for (std::size_t j = 0; j < n; ++j) {
      hr[j] = (xr[j] - mean) * inv;
      o[j] = hr[j] * pg[j] + po[j];
    }
  }

  return Tape<T>::record(
      std::move(out), {x, gain, offset},
      [gain, xhat = std::move(xhat), inv_std = std::move(inv_std), rows, n](const Tensor<T>& g,
                                                                           std::span<Tensor<T>* const> gi) {
        const T* pg = gain.value().ptr();
        std::vector<T> dh(n);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* gr = g.ptr() + r * n;
          const T* hr = xhat.ptr() + r * n;
          if (gi[1]) {
            T* dgain = gi[1]->ptr();
            for (std::size_t j = 0; j < n; ++j) dgain[j] += gr[j] * hr[j];
          }
          if (gi[2]) {
            T* doff = gi[2]->ptr();
            for (std::size_t j = 0; j < n; ++j) doff[j] += gr[j];
          }
          if (!gi[0]) continue;
          T mean_dh = T(0), mean_dh_h = T(0);
          for (std::size_t j = 0; j < n; ++j) {
            dh[j] = gr[j] * pg[j];
            mean_dh += dh[j];
            mean_dh_h += dh[j] * hr[j];
          }
          mean_dh /= static_cast<T>(n);
          mean_dh_h /= static_cast<T>(n);
          T* dx = gi[0]->ptr() + r * n;
          for (std::size_t j = 0; j < n; ++j) dx[j] += inv_std[r] * (dh[j] - mean_dh - hr[j] * mean_dh_h);
        }
      });
}

template <class T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank()) throw ShapeError("softmax: axis out of range for " + to_string(x.dims()));
  const std::size_t last = x.rank() - 1;
  if (axis == last) return softmax(Var<T>::constant(x)).value();
  std::vector<std::size_t> order(x.rank());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::swap(order[axis], order[last]);
  const Tensor<T> moved = softmax(Var<T>::constant(permute(x, order))).value();
  return permute(moved, order);
}

template <class T>
Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v) {
  return attention(Var<T>::constant(q), Var<T>::constant(k), Var<T>::constant(v)).value();
}

template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& offset) {
  return layer_norm(Var<T>::constant(x), Var<T>::constant(gain), Var<T>::constant(offset)).value();
}

#define M2MT_INSTANTIATE_ATTENTION(T)                                                   \
  template Var<T> softmax(const Var<T>&);                                               \
  template Var<T> attention(const Var<T>&, const Var<T>&, const Var<T>&);               \
  template Var<T> layer_norm(const Var<T>&, const Var<T>&, const Var<T>&, T);           \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                            \
  template Tensor<T> attention(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);   \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

M2MT_INSTANTIATE_ATTENTION(float)
M2MT_INSTANTIATE_ATTENTION(double)

}  // namespace m2mt
