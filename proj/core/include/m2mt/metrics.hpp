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

#include <limits>
#include <string>
#include <vector>

#include "m2mt/lf_tensor.hpp"

namespace m2mt {

/// PSNR of identical inputs.
inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// Mean squared error, accumulated in double.
template <class T>
double mse(const Tensor<T>& a, const Tensor<T>& b);

/// 10*log10(peak^2 / MSE); kPsnrInfinity when MSE is zero.
template <class T>
double psnr(const Tensor<T>& a, const Tensor<T>& b, double peak = 1.0);

/// Mean SSIM of two (H, W) images: Gaussian window 11x11 with sigma 1.5,
/// K1 = 0.01, K2 = 0.03, L = 1, averaged over the valid region. An axis
/// shorter than 11 uses a window as long as the axis.
template <class T>
double ssim(const Tensor<T>& a, const Tensor<T>& b);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
template <class T>
Tensor<T> rgb_to_y(const Tensor<T>& r, const Tensor<T>& g, const Tensor<T>& b);

struct MetricReport {
  std::size_t u = 0;
  std::size_t v = 0;
  std::vector<double> psnr;  // per view, index u*V + v
  std::vector<double> ssim;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  double mse = 0.0;
};

/// Per-view PSNR and SSIM of two single-channel light fields.
template <class T>
MetricReport lf_metrics(const LfTensor<T>& sr, const LfTensor<T>& hr);

/// "%.6g" with "inf" for infinities.
std::string format_number(double x);

/// Human-readable PSNR grid followed by the means.
std::string format_table(const MetricReport& rep);
/// key=value lines: mse, mean_psnr, mean_ssim, psnr_u{u}_v{v}, ssim_u{u}_v{v}.
std::string format_kv(const MetricReport& rep);

}  // namespace m2mt
