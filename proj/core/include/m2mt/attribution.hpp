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

// Local attribution maps: path-integrated gradients of an edge detector on
// the super-resolved output, taken along a blurred-to-sharp input path, and
// the Gini-based diffusion index of the resulting map.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>

#include "m2mt/autodiff.hpp"
#include "m2mt/lf_tensor.hpp"

namespace m2mt {

/// Square detector window with origin (x, y) and side l, in output pixels.
struct LamWindow {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t l = 8;
};

struct LamConfig {
  std::size_t m = 50;   // path steps
  double sigma = 4.0;   // blur width at the start of the path, pixels
  LamWindow window;
  bool literal = true;  // see lam()
  /// View the detector reads; the central view when unset.
  std::optional<std::size_t> view_u;
  std::optional<std::size_t> view_v;

  void validate() const;
};

struct GiniResult {
  double gini = 0.0;
  bool degenerate = false;  // every value was zero
};

struct LamResult {
  Tensor<double> map;  // (U*H, V*W, 1), MacPI layout, non-negative
  double gini = 0.0;
  double di = 100.0;   // (1 - gini) * 100
  bool degenerate = false;
};

/// Separable Gaussian blur of every view with the given width, truncated at
/// radius ceil(3*width) with replicated edges. width <= 0 returns lf.
template <class T>
LfTensor<T> gaussian_blur_views(const LfTensor<T>& lf, double width);

/// gamma(k/m): lf blurred with width sigma*(1 - k/m).
template <class T>
LfTensor<T> gaussian_path(const LfTensor<T>& lr, std::size_t k, std::size_t m, double sigma);

/// Sum over i in [x, x+l), j in [y, y+l) of |I(i+1, j) - I(i, j)| +
/// |I(i, j+1) - I(i, j)| on view (view_u, view_v), channel 0. Requires
/// x + l < W and y + l < H.
template <class T>
Var<T> detector(const Var<T>& sr, const LamWindow& window, std::size_t view_u, std::size_t view_v);
template <class T>
T detector(const LfTensor<T>& sr, const LamWindow& window, std::size_t view_u, std::size_t view_v);

/// O(n log n) Gini coefficient; matches the pairwise definition
/// sum_i sum_j |g_i - g_j| / (2 n^2 mean).
GiniResult gini(std::span<const double> values);
/// The pairwise definition itself, O(n^2).
GiniResult gini_naive(std::span<const double> values);

using LamModel = std::function<Var<double>(const Var<double>&)>;

/// Per step k = 1..m, g_k is the gradient of the detector on model(gamma(k/m))
/// with respect to gamma(k/m). Literal mode accumulates
/// g_k * (gamma(k/m) - gamma(min(k+1, m)/m)) / m; otherwise
/// g_k * (gamma(k/m) - gamma((k-1)/m)). The map is the magnitude of the sum
/// in MacPI layout.
LamResult lam(const LamModel& model, const LfTensor<double>& lr, const LamConfig& cfg);

/// Distance from uniform in percent: (1 - gini) * 100, 100 for degenerate maps.
double diffusion_index(const GiniResult& g);

/// Min-max normalized 8-bit rendering of a 2-D or (rows, cols, 1) map.
void write_heatmap_pgm(const std::filesystem::path& path, const Tensor<double>& map);

}  // namespace m2mt
