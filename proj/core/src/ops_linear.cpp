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

#include <array>

#include "m2mt/ops.hpp"

namespace m2mt {

template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& wv = weight.value();
  if (wv.rank() != 2) throw ShapeError("linear: weight must be (Din, Dout), got " + to_string(wv.dims()));
  const std::size_t din = wv.dim(0);
  const std::size_t dout = wv.dim(1);
  if (xv.dims().back() != din) {
    throw ShapeError("linear: input last dim " + std::to_string(xv.dims().back()) + " != Din " + std::to_string(din));
  }
  const bool has_bias = bias.defined();
  if (has_bias && bias.dims() != Dims{dout}) throw ShapeError("linear: bias must be (Dout)");

  const std::size_t rows = xv.size() / din;
  Dims out_dims = xv.dims();
  out_dims.back() = dout;
  Tensor<T> out(out_dims);
  const T* px = xv.ptr();
  const T* pw = wv.ptr();
  for (std::size_t n = 0; n < rows; ++n) {
    T* o = out.ptr() + n * dout;
    const T* xr = px + n * din;
    for (std::size_t k = 0; k < din; ++k) {
      const T a = xr[k];
      const T* wr = pw + k * dout;
      for (std::size_t j = 0; j < dout; ++j) o[j] += a * wr[j];
    }
    if (has_bias) {
      const T* pb = bias.value().ptr();
      for (std::size_t j = 0; j < dout; ++j) o[j] += pb[j];
    }
  }

  return Tape<T>::record(
      std::move(out), {x, weight, bias},
      [x, weight, rows, din, dout](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
        const T* pg = g.ptr();
        if (gi[0]) {
          const T* pw = weight.value().ptr();
          T* dx = gi[0]->ptr();
          for (std::size_t n = 0; n < rows; ++n) {
            const T* gr = pg + n * dout;
            for (std::size_t k = 0; k < din; ++k) {
              const T* wr = pw + k * dout;
              T s = T(0);
              for (std::size_t j = 0; j < dout; ++j) s += gr[j] * wr[j];
              dx[n * din + k] += s;
            }
          }
        }
        if (gi[1]) {
          const T* px = x.value().ptr();
          T* dw = gi[1]->ptr();
          for (std::size_t n = 0; n < rows; ++n) {
            const T* gr = pg + n * dout;
            const T* xr = px + n * din;
            for (std::size_t k = 0; k < din; ++k) {
              const T a = xr[k];
              T* d = dw + k * dout;
              for (std::size_t j = 0; j < dout; ++j) d[j] += a * gr[j];
            }
          }
        }
        if (gi[2]) {
          T* db = gi[2]->ptr();
          for (std::size_t n = 0; n < rows; ++n) {
            const T* gr = pg + n * dout;
            for (std::size_t j = 0; j < dout; ++j) db[j] += gr[j];
          }
        }
      });
}

namespace {

struct ConvGeometry {
  std::size_t n, s0, s1, cin, cout, k0, k1, p0, p1;
};

template <class T>
ConvGeometry conv_geometry(const Tensor<T>& x, const Tensor<T>& kernel) {
  if (x.rank() != 4) throw ShapeError("conv2d: input must be (N, S0, S1, Cin), got " + to_string(x.dims()));
  if (kernel.rank() != 4) throw ShapeError("conv2d: kernel must be (Cout, Cin, kh, kw)");
  const std::size_t k0 = kernel.dim(2);
  const std::size_t k1 = kernel.dim(3);
  auto valid = [](std::size_t k) { return k == 1 || k == 3; };
  if (!valid(k0) || !valid(k1)) {
    throw ShapeError("conv2d: kernel size must be 1 or 3, got " + std::to_string(k0) + "x" + std::to_string(k1));
  }
  if (kernel.dim(1) != x.dim(3)) {
    throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.dim(1)) + " input channels, got " +
                     std::to_string(x.dim(3)));
  }
  return {x.dim(0), x.dim(1), x.dim(2), x.dim(3), kernel.dim(0), k0, k1, (k0 - 1) / 2, (k1 - 1) / 2};
}

// (Cout, Cin, k0, k1) -> [(a*k1 + b)*Cin + ci][co]
template <class T>
std::vector<T> pack_kernel(const Tensor<T>& kernel, const ConvGeometry& g) {
  std::vector<T> packed(kernel.size());
  for (std::size_t co = 0; co < g.cout; ++co)
    for (std::size_t ci = 0; ci < g.cin; ++ci)
      for (std::size_t a = 0; a < g.k0; ++a)
        for (std::size_t b = 0; b < g.k1; ++b)
          packed[((a * g.k1 + b) * g.cin + ci) * g.cout + co] = kernel[((co * g.cin + ci) * g.k0 + a) * g.k1 + b];
  return packed;
}

// Input index for output index i and tap a; false when it falls in padding.
inline bool tap_source(std::size_t i, std::size_t a, std::size_t pad, std::size_t extent, std::size_t& src) {
  if (i + a < pad) return false;
  src = i + a - pad;
  return src < extent;
}

}  // namespace

template <class T>
Var<T> conv2d_nhwc(const Var<T>& x, const Var<T>& kernel, const Var<T>& bias) {
  const ConvGeometry geo = conv_geometry(x.value(), kernel.value());
  const bool has_bias = bias.defined();
  if (has_bias && bias.dims() != Dims{geo.cout}) throw ShapeError("conv2d: bias must be (Cout)");

  const std::vector<T> packed = pack_kernel(kernel.value(), geo);
  Tensor<T> out({geo.n, geo.s0, geo.s1, geo.cout});
  const T* px = x.value().ptr();
  for (std::size_t n = 0; n < geo.n; ++n) {
    for (std::size_t i = 0; i < geo.s0; ++i) {
      for (std::size_t j = 0; j < geo.s1; ++j) {
        T* o = out.ptr() + ((n * geo.s0 + i) * geo.s1 + j) * geo.cout;
        for (std::size_t a = 0; a < geo.k0; ++a) {
          std::size_t ii;
          if (!tap_source(i, a, geo.p0, geo.s0, ii)) continue;
          for (std::size_t b = 0; b < geo.k1; ++b) {
            std::size_t jj;
            if (!tap_source(j, b, geo.p1, geo.s1, jj)) continue;
            const T* xin = px + ((n * geo.s0 + ii) * geo.s1 + jj) * geo.cin;
            const T* wtap = packed.data() + (a * geo.k1 + b) * geo.cin * geo.cout;
            for (std::size_t ci = 0; ci < geo.cin; ++ci) {
              const T xv = xin[ci];
              const T* w = wtap + ci * geo.cout;
              for (std::size_t co = 0; co < geo.cout; ++co) o[co] += xv * w[co];
            }
          }
        }
        if (has_bias) {
          const T* pb = bias.value().ptr();
          for (std::size_t co = 0; co < geo.cout; ++co) o[co] += pb[co];
        }
      }
    }
  }

  return Tape<T>::record(
      std::move(out), {x, kernel, bias}, [x, geo, packed](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
        const T* pg = g.ptr();
        const T* px = x.value().ptr();
        std::vector<T> dpacked(gi[1] ? packed.size() : 0, T(0));
        for (std::size_t n = 0; n < geo.n; ++n) {
          for (std::size_t i = 0; i < geo.s0; ++i) {
            for (std::size_t j = 0; j < geo.s1; ++j) {
              const T* gv = pg + ((n * geo.s0 + i) * geo.s1 + j) * geo.cout;
              for (std::size_t a = 0; a < geo.k0; ++a) {
                std::size_t ii;
                if (!tap_source(i, a, geo.p0, geo.s0, ii)) continue;
                for (std::size_t b = 0; b < geo.k1; ++b) {
                  std::size_t jj;
                  if (!tap_source(j, b, geo.p1, geo.s1, jj)) continue;
                  const std::size_t xoff = ((n * geo.s0 + ii) * geo.s1 + jj) * geo.cin;
                  const std::size_t wbase = (a * geo.k1 + b) * geo.cin * geo.cout;
                  if (gi[0]) {
                    T* dx = gi[0]->ptr() + xoff;
                    for (std::size_t ci = 0; ci < geo.cin; ++ci) {
                      const T* w = packed.data() + wbase + ci * geo.cout;
                      T s = T(0);
                      for (std::size_t co = 0; co < geo.cout; ++co) s += gv[co] * w[co];
                      dx[ci] += s;
                    }
                  }
                  if (gi[1]) {
                    const T* xin = px + xoff;
                    for (std::size_t ci = 0; ci < geo.cin; ++ci) {
                      const T xv = xin[ci];
                      T* dw = dpacked.data() + wbase + ci * geo.cout;
                      for (std::size_t co = 0; co < geo.cout; ++co) dw[co] += xv * gv[co];
                    }
                  }
                }
              }
              if (gi[2]) {
                T* db = gi[2]->ptr();
                for (std::size_t co = 0; co < geo.cout; ++co) db[co] += gv[co];
              }
            }
          }
        }
        if (gi[1]) {
          T* dk = gi[1]->ptr();
          for (std::size_t co = 0; co < geo.cout; ++co)
            for (std::size_t ci = 0; ci < geo.cin; ++ci)
              for (std::size_t a = 0; a < geo.k0; ++a)
                for (std::size_t b = 0; b < geo.k1; ++b)
                  dk[((co * geo.cin + ci) * geo.k0 + a) * geo.k1 + b] +=
                      dpacked[((a * geo.k1 + b) * geo.cin + ci) * geo.cout + co];
        }
      });
}

template <class T>
Var<T> pixel_shuffle_nhwc(const Var<T>& x, std::size_t r) {
  const Tensor<T>& xv = x.value();
  if (xv.rank() != 4) throw ShapeError("pixel_shuffle: input must be (N, S0, S1, C*r*r)");
  if (r == 0 || xv.dim(3) % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channels " + std::to_string(xv.dim(3)) + " not divisible by r^2 = " +
                     std::to_string(r * r));
  }
  const std::size_t n = xv.dim(0), s0 = xv.dim(1), s1 = xv.dim(2), cin = xv.dim(3), c = cin / (r * r);
  // For each output element, the flat input offset it copies.
  std::vector<std::size_t> source(xv.size());
  std::size_t o = 0;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < s0 * r; ++i)
      for (std::size_t j = 0; j < s1 * r; ++j)
        for (std::size_t ch = 0; ch < c; ++ch) {
          const std::size_t si = i / r, d0 = i % r, sj = j / r, d1 = j % r;
          source[o++] = ((b * s0 + si) * s1 + sj) * cin + ch * r * r + d0 * r + d1;
        }
  Tensor<T> out({n, s0 * r, s1 * r, c});
  for (std::size_t k = 0; k < source.size(); ++k) out[k] = xv[source[k]];
  return Tape<T>::record(std::move(out), {x}, [source](const Tensor<T>& g, std::span<Tensor<T>* const> gi) {
    if (!gi[0]) return;
    T* d = gi[0]->ptr();
    for (std::size_t k = 0; k < source.size(); ++k) d[source[k]] += g[k];
  });
}

template <class T>
Tensor<T> linear(const Tensor<T>& x, const LinearParams<T>& p) {
  return linear(Var<T>::constant(x), Var<T>::constant(p.weight),
                p.bias.empty() ? Var<T>() : Var<T>::constant(p.bias))
      .value();
}

template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Conv2dParams<T>& p) {
  if (x.rank() != 3) throw ShapeError("conv2d: input must be (C, H, W), got " + to_string(x.dims()));
  static constexpr std::array<std::size_t, 3> kToLast{1, 2, 0};
  static constexpr std::array<std::size_t, 3> kToFirst{2, 0, 1};
  const std::size_t h = x.dim(1), w = x.dim(2);
  Tensor<T> nhwc = permute(x, kToLast).reshaped({1, h, w, x.dim(0)});
  Var<T> out = conv2d_nhwc(Var<T>::constant(std::move(nhwc)), Var<T>::constant(p.kernel),
                           p.bias.empty() ? Var<T>() : Var<T>::constant(p.bias));
  return permute(out.value().reshaped({h, w, out.dims()[3]}), kToFirst);
}

template <class T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::size_t r) {
  if (x.rank() != 3) throw ShapeError("pixel_shuffle: input must be (C*r*r, H, W)");
  static constexpr std::array<std::size_t, 3> kToLast{1, 2, 0};
  static constexpr std::array<std::size_t, 3> kToFirst{2, 0, 1};
  const std::size_t h = x.dim(1), w = x.dim(2);
  Var<T> out = pixel_shuffle_nhwc(Var<T>::constant(permute(x, kToLast).reshaped({1, h, w, x.dim(0)})), r);
  return permute(out.value().reshaped({h * r, w * r, out.dims()[3]}), kToFirst);
}

#define M2MT_INSTANTIATE_LINEAR(T)                                                \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);            \
  template Var<T> conv2d_nhwc(const Var<T>&, const Var<T>&, const Var<T>&);       \
  template Var<T> pixel_shuffle_nhwc(const Var<T>&, std::size_t);                 \
  template Tensor<T> linear(const Tensor<T>&, const LinearParams<T>&);            \
  template Tensor<T> conv2d(const Tensor<T>&, const Conv2dParams<T>&);            \
  template Tensor<T> pixel_shuffle(const Tensor<T>&, std::size_t);

M2MT_INSTANTIATE_LINEAR(float)
M2MT_INSTANTIATE_LINEAR(double)

}  // namespace m2mt
