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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "m2mt/lf_tensor.hpp"
#include "m2mt/network.hpp"

namespace m2mt::testing {

template <class T>
Tensor<T> random_tensor(Dims dims, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(std::move(dims));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  for (T& x : t.data()) x = static_cast<T>(uni(rng));
  return t;
}

template <class T>
LfTensor<T> random_lf(const LfShape& s, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  return LfTensor<T>(random_tensor<T>(s.dims(), seed, lo, hi));
}

/// Light field whose samples are exact multiples of 1/255.
template <class T>
LfTensor<T> quantized_lf(const LfShape& s, std::uint64_t seed) {
  LfTensor<T> lf(s);
  std::mt19937_64 rng(seed);
  for (T& x : lf.tensor().data()) x = static_cast<T>(rng() % 256) / T(255);
  return lf;
}

/// Smooth test scene sampled on a 5-D grid, values in (0.2, 0.8).
template <class T>
LfTensor<T> smooth_lf(const LfShape& s, double phase = 0.0) {
  LfTensor<T> lf(s);
  for (std::size_t u = 0; u < s.u; ++u)
    for (std::size_t v = 0; v < s.v; ++v)
      for (std::size_t x = 0; x < s.w; ++x)
        for (std::size_t y = 0; y < s.h; ++y)
          for (std::size_t c = 0; c < s.c; ++c)
            lf(u, v, x, y, c) = static_cast<T>(0.5 + 0.3 * std::sin(0.7 * x + 0.2 * u + phase) *
                                                         std::cos(0.5 * y + 0.3 * v + 0.1 * c));
  return lf;
}

/// Small network used by gradient and training tests.
inline NetConfig tiny_config(std::size_t u = 2, std::size_t v = 2) {
  NetConfig cfg;
  cfg.u = u;
  cfg.v = v;
  cfg.c = 3;
  cfg.c_cor = 5;
  cfg.d = 5;
  cfg.n1 = 2;
  cfg.n2 = 1;
  cfg.r = 2;
  cfg.seed = 11;
  return cfg;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("m2mt_" + tag + "_" + std::to_string(rd()) + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace m2mt::testing
