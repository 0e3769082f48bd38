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
#include <numbers>

#include "m2mt/ops.hpp"

namespace m2mt {

namespace {

template <class T>
void require_same_dims(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.dims() != b.dims()) {
    throw ShapeError(std::string(op) + ": dims " + to_string(a.dims()) + " and " + to_string(b.dims()) +
                     " differ");
  }
}

template <class T>
void accumulate(Tensor<T>* dst, const Tensor<T>& src, T factor = T(1)) {
  if (!dst) return;
  T* d = dst->ptr();
  const T* s = src.ptr();
  for (std::size_t i = 0, n = src.size(); i < n; ++i) d[i] += factor * s[i];
}

template <class T>
T sign(T v) {
  return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
}

}  // namespace

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a, b, "add");
  Tensor<T> out = a.value();
  const T* pb = b.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += pb[i];
  return Tape<T>::record(std::move(out), {a, b}, [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    accumulate(gi[0], g);
    accumulate(gi[1], g);
  });
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a, b, "sub");
  Tensor<T> out = a.value();
  const T* pb = b.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= pb[i];
  return Tape<T>::record(std::move(out), {a, b}, [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    accumulate(gi[0], g);
    accumulate(gi[1], g, T(-1));
  });
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a, b, "mul");
  Tensor<T> out = a.value();
  const T* pb = b.value().ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= pb[i];
  return Tape<T>::record(std::move(out), {a, b}, [a, b](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    const T* pa = a.value().ptr();
    const T* pb = b.value().ptr();
    if (gi[0]) {
      T* d = gi[0]->ptr();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * pb[i];
    }
    if (gi[1]) {
      T* d = gi[1]->ptr();
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * pa[i];
    }
  });
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a.value();
  for (T& v : out.data()) v *= s;
  return Tape<T>::record(std::move(out), {a}, [s](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    accumulate(gi[0], g, s);
  });
}

template <class T>
Var<T> add_broadcast(const Var<T>& x, const Var<T>& b) {
  const Dims& xd = x.dims();
  const Dims& bd = b.dims();
  if (bd.size() > xd.size() || !std::equal(bd.begin(), bd.end(), xd.end() - static_cast<std::ptrdiff_t>(bd.size()))) {
    throw ShapeError("add_broadcast: " + to_string(bd) + " is not a trailing block of " + to_string(xd));
  }
  const std::size_t block = b.value().size();
  const std::size_t reps = x.value().size() / block;
  Tensor<T> out = x.value();
  const T* pb = b.value().ptr();
  for (std::size_t r = 0; r < reps; ++r) {
    T* o = out.ptr() + r * block;
    for (std::size_t i = 0; i < block; ++i) o[i] += pb[i];
  }
  return Tape<T>::record(std::move(out), {x, b},
                         [block, reps](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
                           accumulate(gi[0], g);
                           if (gi[1]) {
                             T* d = gi[1]->ptr();
                             for (std::size_t r = 0; r < reps; ++r) {
                               const T* s = g.ptr() + r * block;
                               for (std::size_t i = 0; i < block; ++i) d[i] += s[i];
                             }
                           }
                         });
}

template <class T>
Var<T> sum(const Var<T>& a) {
  T s = T(0);
  for (T v : a.value().data()) s += v;
  return Tape<T>::record(Tensor<T>({1}, s), {a}, [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    if (!gi[0]) return;
    for (T& d : gi[0]->data()) d += g[0];
  });
}

template <class T>
Var<T> mean_abs_diff(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a, b, "mean_abs_diff");
  const std::size_t n = a.value().size();
  const T* pa = a.value().ptr();
  const T* pb = b.value().ptr();
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += std::abs(pa[i] - pb[i]);
  s /= static_cast<T>(n);
  return Tape<T>::record(Tensor<T>({1}, s), {a, b}, [a, b, n](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    const T* pa = a.value().ptr();
    const T* pb = b.value().ptr();
    const T k = g[0] / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const T sg = sign(pa[i] - pb[i]) * k;
      if (gi[0]) (*gi[0])[i] += sg;
      if (gi[1]) (*gi[1])[i] -= sg;
    }
  });
}

template <class T>
Var<T> mean_sq_diff(const Var<T>& a, const Var<T>& b) {
  require_same_dims(a, b, "mean_sq_diff");
  const std::size_t n = a.value().size();
  const T* pa = a.value().ptr();
  const T* pb = b.value().ptr();
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  s /= static_cast<T>(n);
  return Tape<T>::record(Tensor<T>({1}, s), {a, b}, [a, b, n](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    const T* pa = a.value().ptr();
    const T* pb = b.value().ptr();
    const T k = T(2) * g[0] / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const T d = (pa[i] - pb[i]) * k;
      if (gi[0]) (*gi[0])[i] += d;
      if (gi[1]) (*gi[1])[i] -= d;
    }
  });
}

template <class T>
Var<T> reshape(const Var<T>& x, Dims dims) {
  Tensor<T> out = x.value().reshaped(std::move(dims));
  return Tape<T>::record(std::move(out), {x}, [](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    accumulate(gi[0], g);
  });
}

template <class T>
Var<T> permute(const Var<T>& x, std::span<const std::size_t> axes) {
  Tensor<T> out = permute(x.value(), axes);
  std::vector<std::size_t> inv = inverse_permutation(axes);
  return Tape<T>::record(std::move(out), {x}, [inv](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    if (gi[0]) accumulate(gi[0], permute(g, inv));
  });
}

template <class T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  Tensor<T> out = x.value();
  for (T& v : out.data()) v = v > T(0) ? v : v * slope;
  return Tape<T>::record(std::move(out), {x}, [x, slope](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    if (!gi[0]) return;
    const T* px = x.value().ptr();
    T* d = gi[0]->ptr();
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += px[i] > T(0) ? g[i] : g[i] * slope;
  });
}

template <class T>
Var<T> gelu(const Var<T>& x) {
  constexpr T kInvSqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  constexpr T kInvSqrt2Pi = std::numbers::inv_sqrtpi_v<T> * kInvSqrt2;
  Tensor<T> out = x.value();
  for (T& v : out.data()) v = v * T(0.5) * (T(1) + std::erf(v * kInvSqrt2));
  return Tape<T>::record(std::move(out), {x}, [x](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    if (!gi[0]) return;
    const T* px = x.value().ptr();
    T* d = gi[0]->ptr();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T v = px[i];
      const T cdf = T(0.5) * (T(1) + std::erf(v * kInvSqrt2));
      const T pdf = kInvSqrt2Pi * std::exp(T(-0.5) * v * v);
      d[i] += g[i] * (cdf + v * pdf);
    }
  });
}

template <class T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  return leaky_relu(Var<T>::constant(x), slope).value();
}

template <class T>
Tensor<T> gelu(const Tensor<T>& x) {
  return gelu(Var<T>::constant(x)).value();
}

#define M2MT_INSTANTIATE_ELEMENTWISE(T)                                  \
  template Var<T> add(const Var<T>&, const Var<T>&);                     \
  template Var<T> sub(const Var<T>&, const Var<T>&);                     \
  template Var<T> mul(const Var<T>&, const Var<T>&);                     \
  template Var<T> scale(const Var<T>&, T);                               \
  template Var<T> add_broadcast(const Var<T>&, const Var<T>&);           \
  template Var<T> sum(const Var<T>&);                                    \
  template Var<T> mean_abs_diff(const Var<T>&, const Var<T>&);           \
  template Var<T> mean_sq_diff(const Var<T>&, const Var<T>&);            \
  template Var<T> reshape(const Var<T>&, Dims);                          \
  template Var<T> permute(const Var<T>&, std::span<const std::size_t>);  \
  template Var<T> leaky_relu(const Var<T>&, T);                          \
  template Var<T> gelu(const Var<T>&);                                   \
  template Tensor<T> leaky_relu(const Tensor<T>&, T);                    \
  template Tensor<T> gelu(const Tensor<T>&);

M2MT_INSTANTIATE_ELEMENTWISE(float)
M2MT_INSTANTIATE_ELEMENTWISE(double)

}  // namespace m2mt
