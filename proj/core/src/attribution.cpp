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

#include "m2mt/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "m2mt/image_io.hpp"

namespace m2mt {

void LamConfig::validate() const {
  if (m < 1) throw std::invalid_argument("lam: steps must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("lam: sigma must be >= 0");
  if (window.l < 1) throw std::invalid_argument("lam: window size must be >= 1");
}

namespace {

template <class T>
T sign(T v) {
  return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
}

std::vector<double> gaussian_taps(double width, std::size_t radius) {
  std::vector<double> w(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(radius);
    w[i] = std::exp(-t * t / (2.0 * width * width));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

struct WindowGeometry {
  std::size_t offset;  // flat offset of (view, x=0, y=0, ch=0)
  std::size_t sx, sy;  // strides of x and y
};

WindowGeometry window_geometry(const Dims& d, const LamWindow& win, std::size_t vu, std::size_t vv) {
  if (d.size() != 5) throw ShapeError("detector: expected (U, V, W, H, C), got " + to_string(d));
  if (vu >= d[0] || vv >= d[1]) throw std::out_of_range("detector: view index out of range");
  if (win.l < 1 || win.x + win.l >= d[2] || win.y + win.l >= d[3]) {
    throw std::out_of_range("detector: window (" + std::to_string(win.x) + ", " + std::to_string(win.y) + ", " +
                            std::to_string(win.l) + ") needs x+l < " + std::to_string(d[2]) + " and y+l < " +
                            std::to_string(d[3]));
  }
  const std::size_t sy = d[4];
  const std::size_t sx = d[3] * sy;
  return {(vu * d[1] + vv) * d[2] * sx, sx, sy};
}

}  // namespace

template <class T>
LfTensor<T> gaussian_blur_views(const LfTensor<T>& lf, double width) {
  if (!(width > 0.0)) return lf;
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * width));
  const std::vector<double> w = gaussian_taps(width, radius);
  const LfShape s = lf.shape();
  const auto clamp_index = [](long long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(i, 0LL, static_cast<long long>(n) - 1));
  };

  LfTensor<T> tmp(s), out(s);
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t ch = 0; ch < s.c; ++ch) {
        for (std::size_t x = 0; x < s.w; ++x)
          for (std::size_t y = 0; y < s.h; ++y) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w.size(); ++t) {
              const long long xi = static_cast<long long>(x + t) - static_cast<long long>(radius);
              acc += w[t] * static_cast<double>(lf(u, v, clamp_index(xi, s.w), y, ch));
            }
            tmp(u, v, x, y, ch) = static_cast<T>(acc);
          }
        for (std::size_t x = 0; x < s.w; ++x)
          for (std::size_t y = 0; y < s.h; ++y) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w.size(); ++t) {
              const long long yi = static_cast<long long>(y + t) - static_cast<long long>(radius);
              acc += w[t] * static_cast<double>(tmp(u, v, x, clamp_index(yi, s.h), ch));
            }
            out(u, v, x, y, ch) = static_cast<T>(acc);
          }
      }
  return out;
}

template <class T>
LfTensor<T> gaussian_path(const LfTensor<T>& lr, std::size_t k, std::size_t m, double sigma) {
  if (m == 0 || k > m) throw std::invalid_argument("gaussian_path: need 0 <= k <= m and m >= 1");
  if (k == m) return lr;
  const double width = sigma * (1.0 - static_cast<double>(k) / static_cast<double>(m));
  return gaussian_blur_views(lr, width);
}

template <class T>
Var<T> detector(const Var<T>& sr, const LamWindow& window, std::size_t view_u, std::size_t view_v) {
  const WindowGeometry g = window_geometry(sr.dims(), window, view_u, view_v);
  const T* p = sr.value().ptr();
  T total = T(0);
  for (std::size_t i = window.x; i < window.x + window.l; ++i) {
    for (std::size_t j = window.y; j < window.y + window.l; ++j) {
      const std::size_t at = g.offset + i * g.sx + j * g.sy;
      total += std::abs(p[at + g.sx] - p[at]) + std::abs(p[at + g.sy] - p[at]);
    }
  }
  return Tape<T>::record(Tensor<T>({1}, total), {sr},
                         [sr, window, g](const Tensor<T>& grad, std::span<Tensor<T>* const> gi) {
                           if (!gi[0]) return;
                           const T* p = sr.value().ptr();
                           T* d = gi[0]->ptr();
                           for (std::size_t i = window.x; i < window.x + window.l; ++i) {
                             for (std::size_t j = window.y; j < window.y + window.l; ++j) {
                               const std::size_t at = g.offset + i * g.sx + j * g.sy;
                               const T a = sign(p[at + g.sx] - p[at]) * grad[0];
                               const T b = sign(p[at + g.sy] - p[at]) * grad[0];
                               d[at + g.sx] += a;
                               d[at + g.sy] += b;
                               d[at] -= a + b;
                             }
                           }
                         });
}

template <class T>
T detector(const LfTensor<T>& sr, const LamWindow& window, std::size_t view_u, std::size_t view_v) {
  return detector(Var<T>::constant(sr.tensor()), window, view_u, view_v).value()[0];
}

GiniResult gini(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini: needs at least one value");
  std::vector<double> g(values.begin(), values.end());
  for (double x : g) {
    if (!(x >= 0.0)) throw std::invalid_argument("gini: values must be non-negative and finite");
  }
  std::sort(g.begin(), g.end());
  const std::size_t n = g.size();
  double total = 0.0;
  for (double x : g) total += x;
  if (total == 0.0) return {0.0, true};
  // sum_{i<j} (g_(j) - g_(i)) = sum_k k (n - k) (g_(k) - g_(k-1)).
  double pairs = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    pairs += static_cast<double>(k) * static_cast<double>(n - k) * (g[k] - g[k - 1]);
  }
  return {pairs / (static_cast<double>(n) * total), false};
}

GiniResult gini_naive(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini: needs at least one value");
  const auto n = static_cast<double>(values.size());
  double total = 0.0;
  for (double x : values) total += x;
  if (total == 0.0) return {0.0, true};
  double diff = 0.0;
  for (double a : values)
    for (double b : values) diff += std::abs(a - b);
  return {diff / (2.0 * n * n * (total / n)), false};
}

double diffusion_index(const GiniResult& g) { return g.degenerate ? 100.0 : (1.0 - g.gini) * 100.0; }

LamResult lam(const LamModel& model, const LfTensor<double>& lr, const LamConfig& cfg) {
  cfg.validate();
  const LfShape s = lr.shape();
  const std::size_t vu = cfg.view_u.value_or(s.u / 2);
  const std::size_t vv = cfg.view_v.value_or(s.v / 2);
  const std::size_t m = cfg.m;

  std::vector<LfTensor<double>> path;
  path.reserve(m + 1);
  for (std::size_t k = 0; k <= m; ++k) path.push_back(gaussian_path(lr, k, m, cfg.sigma));

  Tensor<double> acc(s.dims());
  for (std::size_t k = 1; k <= m; ++k) {
    Tape<double> tape;
    const Var<double> x = tape.leaf(path[k].tensor());
    const Var<double> score = detector(model(x), cfg.window, vu, vv);
    tape.backward(score);
    const Tensor<double>& g = x.grad();
    const Tensor<double>& here = path[k].tensor();
    const Tensor<double>& other = cfg.literal ? path[std::min(k + 1, m)].tensor() : path[k - 1].tensor();
    const double scale = cfg.literal ? 1.0 / static_cast<double>(m) : 1.0;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i] * (here[i] - other[i]) * scale;
  }
  for (double& a : acc.data()) a = std::abs(a);

  LamResult res;
  res.map = to_macpi(LfTensor<double>(std::move(acc)));
  const GiniResult gr = gini(res.map.data());
  res.gini = gr.gini;
  res.degenerate = gr.degenerate;
  res.di = diffusion_index(gr);
  return res;
}

void write_heatmap_pgm(const std::filesystem::path& path, const Tensor<double>& map) {
  if (map.rank() != 2 && !(map.rank() == 3 && map.dim(2) == 1)) {
    throw ShapeError("heatmap: expected (rows, cols) or (rows, cols, 1), got " + to_string(map.dims()));
  }
  const auto [lo, hi] = std::minmax_element(map.data().begin(), map.data().end());
  const double span = *hi - *lo;
  Image img;
  img.height = map.dim(0);
  img.width = map.dim(1);
  img.maxval = 255;
  img.samples.reserve(map.size());
  for (double x : map.data()) {
    const double t = span > 0.0 ? (x - *lo) / span : 0.0;
    img.samples.push_back(static_cast<std::uint16_t>(std::lround(t * 255.0)));
  }
  write_pnm(path, img);
}

#define M2MT_INSTANTIATE_ATTRIBUTION(T)                                                       \
  template LfTensor<T> gaussian_blur_views(const LfTensor<T>&, double);                       \
  template LfTensor<T> gaussian_path(const LfTensor<T>&, std::size_t, std::size_t, double);   \
  template Var<T> detector(const Var<T>&, const LamWindow&, std::size_t, std::size_t);        \
  template T detector(const LfTensor<T>&, const LamWindow&, std::size_t, std::size_t);

M2MT_INSTANTIATE_ATTRIBUTION(float)
M2MT_INSTANTIATE_ATTRIBUTION(double)

}  // namespace m2mt
