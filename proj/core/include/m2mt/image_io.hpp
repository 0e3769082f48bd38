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

// Binary PGM (P5) and PPM (P6) images, and light fields stored as a
// directory of per-view PGMs named view_u{u}_v{v}.pgm with an optional
// meta.txt (U=, V=, bitdepth=).

#include <cstdint>
#include <filesystem>
#include <vector>

#include "m2mt/lf_tensor.hpp"
#include "m2mt/tensor_io.hpp"

namespace m2mt {

/// Raw samples, row-major with `height` rows of `width * channels` values.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> samples;
};

/// Reads P5 (1 channel) or P6 (3 channels) with maxval up to 65535.
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const Image& img);

/// Luma of a P6 image through rgb_to_y, or the plane of a P5 image, as an
/// (H, W) tensor in [0, 1].
Tensor<double> read_luma(const std::filesystem::path& path);

/// Loads a light field directory as (U, V, W, H, 1) with values divided by
/// maxval. With central > 0 only the central central x central views are
/// kept.
template <class T>
LfTensor<T> load_lf(const std::filesystem::path& dir, std::size_t central = 0);

/// Writes one PGM per view plus meta.txt. Values are clamped to [0, 1] and
/// rounded to the nearest level of the given bit depth (8 or 16).
template <class T>
void save_lf(const LfTensor<T>& lf, const std::filesystem::path& dir, int bitdepth = 8);

/// Central n x n crop of the angular grid.
template <class T>
LfTensor<T> central_views(const LfTensor<T>& lf, std::size_t n);

std::string view_filename(std::size_t u, std::size_t v);

/// Reads a light field from an LFT1 file or an image directory.
template <class T>
LfTensor<T> load_lf_any(const std::filesystem::path& path, std::size_t central = 0);

}  // namespace m2mt
