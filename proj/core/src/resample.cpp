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

#include <algorithm>
#include <cmath>
#include <utility>

#include "m2mt/ops.hpp"

namespace m2mt {

double cubic_kernel(double t) {
  constexpr double a = -0.5;
  const double x = std::abs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

std::size_t resized_extent(std::size_t n, double scale) {
  if (!(scale > 0.0)) throw ShapeError("resize: scale must be > 0");
  const double r = std::round(static_cast<double>(n) * scale);
  if (r < 1.0) throw ShapeError("resize: output extent < 1 for n=" + std::to_string(n));
  return static_cast<std::size_t>(r);
}

ResampleTaps cubic_taps(std::size_t in_size, std::size_t out_size, double scale) {
  if (in_size == 0 || out_size == 0) throw ShapeError("cubic_taps: extents must be >= 1");
  if (!(scale > 0.0)) throw ShapeError("cubic_taps: scale must be > 0");
  const double kscale = scale < 1.0 ? scale : 1.0;
  const double support = 2.0 / kscale;
  const auto last = static_cast<long long>(in_size) - 1;

  ResampleTaps taps;
  taps.in_size = in_size;
  taps.out_size = out_size;
  taps.offsets.reserve(out_size + 1);
  taps.offsets.push_back(0);
  for (std::size_t i = 0; i < out_size; ++i) {
    const double center = (static_cast<double>(i) + 0.5) / scale - 0.5;
    const auto lo = static_cast<long long>(std::ceil(center - support));
    const auto hi = static_cast<long long>(std::floor(center + support));
    // Taps are ordered by distance from the sample point, so mirrored
    // outputs accumulate mirrored inputs in the same order.
    std::vector<std::pair<double, long long>> near;
    for (long long j = lo; j <= hi; ++j) near.emplace_back(std::abs(center - static_cast<double>(j)), j);
    std::stable_sort(near.begin(), near.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t begin = taps.weight.size();
    double total = 0.0;
    double prev = -1.0;
    for (const auto& [dist, j] : near) {
      const double w = cubic_kernel(dist * kscale);
      if (w == 0.0) continue;
      // Equidistant taps are summed with each other before joining the total.
      const bool tie = taps.weight.size() > begin && !taps.tie[taps.tie.size() - 1] && dist == prev;
      taps.tie.push_back(tie ? 1 : 0);
      taps.index.push_back(static_cast<std::size_t>(std::clamp(j, 0LL, last)));
      taps.weight.push_back(w);
      prev = dist;
      total += w;
    }
    for (std::size_t t = begin; t < taps.weight.size(); ++t) taps.weight[t] /= total;
    taps.offsets.push_back(taps.weight.size());
  }
  return taps;
}

template <class T>
Var<T> resample_axis(const Var<T>& x, std::size_t axis, const ResampleTaps& taps) {
  const Dims& xd = x.dims();
  if (axis >= xd.size()) throw ShapeError("resample_axis: axis out of range for " + to_string(xd));
  if (xd[axis] != taps.in_size) {
    throw ShapeError("resample_axis: axis extent " + std::to_string(xd[axis]) + " != taps input " +
                     std::to_string(taps.in_size));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= xd[i];
  for (std::size_t i = axis + 1; i < xd.size(); ++i) inner *= xd[i];
  const std::size_t n_in = taps.in_size, n_out = taps.out_size;
  std::vector<T> w(taps.weight.begin(), taps.weight.end());

  Dims od = xd;
  od[axis] = n_out;
  Tensor<T> out(od);
  const T* px = x.value().ptr();
  for (std::size_t o = 0; o < outer; ++o) {
    const T* src = px + o * n_in * inner;
    T* dst = out.ptr() + o * n_out * inner;
    for (std::size_t i = 0; i < n_out; ++i) {
      T* d = dst + i * inner;
      const std::size_t end = taps.offsets[i + 1];
      for (std::size_t t = taps.offsets[i]; t < end; ++t) {
        const T wt = w[t];
        const T* s = src + taps.index[t] * inner;
        if (t + 1 < end && taps.tie[t + 1]) {
          const T wn = w[t + 1];
          const T* sn = src + taps.index[t + 1] * inner;
          for (std::size_t k = 0; k < inner; ++k) d[k] += wt * s[k] + wn * sn[k];
          ++t;
          continue;
        }
        for (std::size_t k = 0; k < inner; ++k) d[k] += wt * s[k];
      }
    }
  }
  return Tape<T>::record(std::move(out), {x},
                         [taps, w = std::move(w), outer, inner](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                           if (!gi[0]) return;
                           const std::size_t n_in = taps.in_size, n_out = taps.out_size;
                           for (std::size_t o = 0; o < outer; ++o) {
                             const T* src = g.ptr() + o * n_out * inner;
                             T* dst = gi[0]->ptr() + o * n_in * inner;
                             for (std::size_t i = 0; i < n_out; ++i) {
                               const T* s = src + i * inner;
                               for (std::size_t t = taps.offsets[i]; t < taps.offsets[i + 1]; ++t) {
                                 const T wt = w[t];
                                 T* d = dst + taps.index[t] * inner;
                                 for (std::size_t k = 0; k < inner; ++k) d[k] += wt * s[k];
                               }
                             }
                           }
                         });
}

template <class T>
Var<T> resample_both_orders(const Var<T>& x, std::size_t a0, const ResampleTaps& t0, std::size_t a1,
                            const ResampleTaps& t1) {
  const Var<T> first = resample_axis(resample_axis(x, a0, t0), a1, t1);
  const Var<T> second = resample_axis(resample_axis(x, a1, t1), a0, t0);
  return scale(add(first, second), T(0.5));
}

template <class T>
Var<T> bicubic_resize_nhwc(const Var<T>& x, double scale) {
  if (x.value().rank() != 4) throw ShapeError("bicubic_resize: input must be (N, S0, S1, C)");
  const std::size_t s0 = x.dims()[1], s1 = x.dims()[2];
  const ResampleTaps t0 = cubic_taps(s0, resized_extent(s0, scale), scale);
  const ResampleTaps t1 = cubic_taps(s1, resized_extent(s1, scale), scale);
  return resample_both_orders(x, 1, t0, 2, t1);
}

template <class T>
Tensor<T> bicubic_resize(const Tensor<T>& x, double scale) {
  if (x.rank() != 3) throw ShapeError("bicubic_resize: input must be (C, H, W), got " + to_string(x.dims()));
  // Channels become the batch axis of the channels-last path.
  const Var<T> v = Var<T>::constant(x.reshaped({x.dim(0), x.dim(1), x.dim(2), 1}));
  Tensor<T> out = bicubic_resize_nhwc(v, scale).value();
  return std::move(out).reshaped({out.dim(0), out.dim(1), out.dim(2)});
}

#define M2MT_INSTANTIATE_RESAMPLE(T)                                              \
  template Var<T> resample_axis(const Var<T>&, std::size_t, const ResampleTaps&); \
  template Var<T> resample_both_orders(const Var<T>&, std::size_t, const ResampleTaps&, std::size_t,  \
                                       const ResampleTaps&);                                          \
  template Var<T> bicubic_resize_nhwc(const Var<T>&, double);                     \
  template Tensor<T> bicubic_resize(const Tensor<T>&, double);

M2MT_INSTANTIATE_RESAMPLE(float)
M2MT_INSTANTIATE_RESAMPLE(double)

}  // namespace m2mt
