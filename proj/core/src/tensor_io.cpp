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

#include "m2mt/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace m2mt {

const char* dtype_name(Dtype d) { return d == Dtype::kF32 ? "f32" : "f64"; }

Dtype parse_dtype_name(const std::string& name) {
  if (name == "f32") return Dtype::kF32;
  if (name == "f64") return Dtype::kF64;
  throw FormatError("unknown dtype '" + name + "'");
}

namespace le {

namespace {

template <class U>
void put_le(std::ostream& os, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <class U>
U get_le(std::istream& is) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) throw FormatError("unexpected end of file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

template <class T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

}  // namespace

void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get_le<std::uint64_t>(is); }

template <class T>
void put_values(std::ostream& os, std::span<const T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (T v : values) put_le(os, std::bit_cast<Bits<T>>(v));
  }
}

template <class T>
void get_values(std::istream& is, std::span<T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()))) {
      throw FormatError("truncated tensor payload");
    }
  } else {
    for (T& v : values) v = std::bit_cast<T>(get_le<Bits<T>>(is));
  }
}

template void put_values(std::ostream&, std::span<const float>);
template void put_values(std::ostream&, std::span<const double>);
template void get_values(std::istream&, std::span<float>);
template void get_values(std::istream&, std::span<double>);

}  // namespace le

template <class T>
void write_lft(std::ostream& os, const Tensor<T>& t) {
  if (t.empty()) throw ShapeError("cannot serialize an empty tensor");
  if (t.rank() > 255) throw ShapeError("LFT1 supports at most 255 dimensions");
  const char header[8] = {'L', 'F', 'T', '1', static_cast<char>(dtype_of<T>()), static_cast<char>(t.rank()), 0, 0};
  os.write(header, sizeof(header));
  for (std::size_t d : t.dims()) le::put_u64(os, d);
  le::put_values<T>(os, t.data());
  if (!os) throw IoError("write failed while emitting LFT1 tensor");
}

template <class T>
void write_lft(const std::filesystem::path& path, const Tensor<T>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_lft(os, t);
}

AnyTensor read_lft(std::istream& is) {
  char header[8];
  if (!is.read(header, sizeof(header))) throw FormatError("LFT1: truncated header");
  if (std::memcmp(header, "LFT1", 4) != 0) throw FormatError("LFT1: bad magic");
  const auto dtype = static_cast<unsigned char>(header[4]);
  const auto ndim = static_cast<unsigned char>(header[5]);
  if (header[6] != 0 || header[7] != 0) throw FormatError("LFT1: reserved bytes must be zero");
  if (dtype > 1) throw FormatError("LFT1: unknown dtype code " + std::to_string(dtype));
  if (ndim == 0) throw FormatError("LFT1: ndim must be >= 1");
  Dims dims(ndim);
  for (auto& d : dims) {
    d = le::get_u64(is);
    if (d == 0) throw FormatError("LFT1: zero extent");
  }
  auto read_payload = [&](auto tag) -> AnyTensor {
    using T = decltype(tag);
    Tensor<T> t(dims);
    le::get_values<T>(is, t.data());
    return t;
  };
  return dtype == 0 ? read_payload(float{}) : read_payload(double{});
}

AnyTensor read_lft(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_lft(is);
}

template <class T>
Tensor<T> read_lft_as(const std::filesystem::path& path) {
  return std::visit([](auto&& t) { return t.template cast<T>(); }, read_lft(path));
}

template void write_lft(std::ostream&, const Tensor<float>&);
template void write_lft(std::ostream&, const Tensor<double>&);
template void write_lft(const std::filesystem::path&, const Tensor<float>&);
template void write_lft(const std::filesystem::path&, const Tensor<double>&);
template Tensor<float> read_lft_as(const std::filesystem::path&);
template Tensor<double> read_lft_as(const std::filesystem::path&);

}  // namespace m2mt
