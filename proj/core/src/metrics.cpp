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

#include "m2mt/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace m2mt {

namespace {

template <class T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.dims() != b.dims()) {
    throw ShapeError(std::string(op) + ": dims " + to_string(a.dims()) + " and " + to_string(b.dims()) + " differ");
  }
}

std::vector<double> gaussian_window(std::size_t k, double sigma) {
  std::vector<double> w(k);
  const double mid = (static_cast<double>(k) - 1.0) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) - mid;
    w[i] = std::exp(-t * t / (2.0 * sigma * sigma));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

// Valid-region separable filter of a (rows, cols) image.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t rows, std::size_t cols,
                                 const std::vector<double>& wr, const std::vector<double>& wc) {
  const std::size_t out_r = rows - wr.size() + 1, out_c = cols - wc.size() + 1;
  std::vector<double> tmp(out_r * cols, 0.0);
  for (std::size_t i = 0; i < out_r; ++i)
    for (std::size_t k = 0; k < wr.size(); ++k)
      for (std::size_t j = 0; j < cols; ++j) tmp[i * cols + j] += wr[k] * img[(i + k) * cols + j];
  std::vector<double> out(out_r * out_c, 0.0);
  for (std::size_t i = 0; i < out_r; ++i)
    for (std::size_t j = 0; j < out_c; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < wc.size(); ++k) s += wc[k] * tmp[i * cols + j + k];
      out[i * out_c + j] = s;
    }
  return out;
}

}  // namespace

template <class T>
double mse(const Tensor<T>& a, const Tensor<T>& b) {
  require_same(a, b, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

template <class T>
double psnr(const Tensor<T>& a, const Tensor<T>& b, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / m);
}

template <class T>
double ssim(const Tensor<T>& a, const Tensor<T>& b) {
  require_same(a, b, "ssim");
  if (a.rank() != 2) throw ShapeError("ssim: expected an (H, W) image, got " + to_string(a.dims()));
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  const std::vector<double> wr = gaussian_window(std::min<std::size_t>(11, rows), 1.5);
  const std::vector<double> wc = gaussian_window(std::min<std::size_t>(11, cols), 1.5);

  const std::size_t n = a.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(a[i]);
    y[i] = static_cast<double>(b[i]);
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, rows, cols, wr, wc);
  const auto my = filter_valid(y, rows, cols, wr, wc);
  const auto mxx = filter_valid(xx, rows, cols, wr, wc);
  const auto myy = filter_valid(yy, rows, cols, wr, wc);
  const auto mxy = filter_valid(xy, rows, cols, wr, wc);

  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double mu = mx[i] * my[i];
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cov = mxy[i] - mu;
    total += ((2.0 * mu + kC1) * (2.0 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mx.size());
}

template <class T>
Tensor<T> rgb_to_y(const Tensor<T>& r, const Tensor<T>& g, const Tensor<T>& b) {
  require_same(r, g, "rgb_to_y");
  require_same(r, b, "rgb_to_y");
  Tensor<T> y(r.dims());
  for (std::size_t i = 0; i < r.size(); ++i) {
    y[i] = static_cast<T>(0.299 * static_cast<double>(r[i]) + 0.587 * static_cast<double>(g[i]) +
                          0.114 * static_cast<double>(b[i]));
  }
  return y;
}

template <class T>
MetricReport lf_metrics(const LfTensor<T>& sr, const LfTensor<T>& hr) {
  if (!(sr.shape() == hr.shape())) {
    throw ShapeError("lf_metrics: shapes " + to_string(sr.shape()) + " and " + to_string(hr.shape()) + " differ");
  }
  const LfShape s = sr.shape();
  if (s.c != 1) throw ShapeError("lf_metrics: expected single-channel light fields");
  MetricReport rep;
  rep.u = s.u;
  rep.v = s.v;
  rep.mse = mse(sr.tensor(), hr.tensor());
  const std::size_t plane = s.w * s.h;
  for (std::size_t k = 0; k < s.views(); ++k) {
    Tensor<T> a({s.w, s.h}), b({s.w, s.h});
    std::copy_n(sr.tensor().ptr() + k * plane, plane, a.ptr());
    std::copy_n(hr.tensor().ptr() + k * plane, plane, b.ptr());
    rep.psnr.push_back(psnr(a, b));
    rep.ssim.push_back(ssim(a, b));
  }
  for (std::size_t k = 0; k < s.views(); ++k) {
    rep.mean_psnr += rep.psnr[k];
    rep.mean_ssim += rep.ssim[k];
  }
  rep.mean_psnr /= static_cast<double>(s.views());
  rep.mean_ssim /= static_cast<double>(s.views());
  return rep;
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string format_table(const MetricReport& rep) {
  std::string out = "PSNR (dB) per view, rows u, columns v\n";
  for (std::size_t u = 0; u < rep.u; ++u) {
    for (std::size_t v = 0; v < rep.v; ++v) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "%10s", format_number(rep.psnr[u * rep.v + v]).c_str());
      out += cell;
    }
    out += '\n';
  }
  out += "mean PSNR " + format_number(rep.mean_psnr) + " dB\n";
  out += "mean SSIM " + format_number(rep.mean_ssim) + "\n";
  out += "MSE " + format_number(rep.mse) + "\n";
  return out;
}

std::string format_kv(const MetricReport& rep) {
  std::string out = "mse=" + format_number(rep.mse) + "\n";
  out += "mean_psnr=" + format_number(rep.mean_psnr) + "\n";
  out += "mean_ssim=" + format_number(rep.mean_ssim) + "\n";
  for (std::size_t u = 0; u < rep.u; ++u) {
    for (std::size_t v = 0; v < rep.v; ++v) {
      const std::string key = "_u" + std::to_string(u) + "_v" + std::to_string(v) + "=";
      out += "psnr" + key + format_number(rep.psnr[u * rep.v + v]) + "\n";
      out += "ssim" + key + format_number(rep.ssim[u * rep.v + v]) + "\n";
    }
  }
  return out;
}

#define M2MT_INSTANTIATE_METRICS(T)                                               \
  template double mse(const Tensor<T>&, const Tensor<T>&);                        \
  template double psnr(const Tensor<T>&, const Tensor<T>&, double);               \
  template double ssim(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> rgb_to_y(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template MetricReport lf_metrics(const LfTensor<T>&, const LfTensor<T>&);

M2MT_INSTANTIATE_METRICS(float)
M2MT_INSTANTIATE_METRICS(double)

}  // namespace m2mt
