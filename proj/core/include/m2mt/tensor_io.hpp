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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "m2mt/tensor.hpp"

namespace m2mt {

/// Malformed or unsupported file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures (missing file, unreadable, unwritable).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dtype : std::uint8_t { kF32 = 0, kF64 = 1 };

template <class T>
constexpr Dtype dtype_of();
template <>
constexpr Dtype dtype_of<float>() {
  return Dtype::kF32;
}
template <>
constexpr Dtype dtype_of<double>() {
  return Dtype::kF64;
}

const char* dtype_name(Dtype d);
Dtype parse_dtype_name(const std::string& name);

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

// LFT1 layout: "LFT1", u8 dtype, u8 ndim, 2 zero bytes, ndim x u64 LE dims,
// then the row-major payload in little-endian.
template <class T>
void write_lft(std::ostream& os, const Tensor<T>& t);
template <class T>
void write_lft(const std::filesystem::path& path, const Tensor<T>& t);

AnyTensor read_lft(std::istream& is);
AnyTensor read_lft(const std::filesystem::path& path);

/// Reads an LFT1 file and converts the payload to T.
template <class T>
Tensor<T> read_lft_as(const std::filesystem::path& path);

namespace le {
// Little-endian scalar packing shared by the binary formats.
void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
template <class T>
void put_values(std::ostream& os, std::span<const T> values);
template <class T>
void get_values(std::istream& is, std::span<T> values);
}  // namespace le

}  // namespace m2mt
