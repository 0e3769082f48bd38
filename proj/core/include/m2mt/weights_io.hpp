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

// M2MW1 weight container:
//
//   "M2MW1" | u32 LE manifest length | manifest | payload
//
// The manifest is UTF-8, one line per tensor:
// name TAB dtype TAB dim,dim,... TAB byte-offset, where the offset is relative
// to the start of the payload. Payloads are packed little-endian in manifest
// order.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "m2mt/network.hpp"
#include "m2mt/tensor_io.hpp"

namespace m2mt {

struct WeightRecord {
  std::string name;
  Dtype dtype = Dtype::kF32;
  Dims dims;
  std::uint64_t offset = 0;
};

struct WeightFile {
  std::vector<WeightRecord> manifest;
  std::vector<AnyTensor> tensors;  // parallel to manifest

  const AnyTensor* find(const std::string& name) const;
};

template <class T>
void write_weights(std::ostream& os, const std::vector<std::pair<std::string, const Tensor<T>*>>& tensors);
WeightFile read_weights(std::istream& is);
WeightFile read_weights(const std::filesystem::path& path);

/// Writes every parameter of `net` in registry order.
template <class T, class Net>
void save_weights(const std::filesystem::path& path, const Net& net);

/// Copies weights into an already shaped network. Every registry name must
/// be present with matching dims; values are converted to T.
template <class T, class Net>
void assign_weights(const WeightFile& file, Net& net);

enum class NetKind { kM2mt, kO2o };

/// Recovers the architecture from the manifest. The file records U*V but not
/// U and V separately, so `views_u` and `views_v` must multiply to it.
/// `residual` is not recorded and is taken from `base`, as is the seed.
NetConfig infer_config(const WeightFile& file, std::size_t views_u, std::size_t views_v, NetKind* kind = nullptr,
                       const NetConfig& base = NetConfig());

template <class T>
Network<T> load_network(const WeightFile& file, const NetConfig& cfg);
template <class T>
O2OBaseline<T> load_o2o(const WeightFile& file, const NetConfig& cfg);

}  // namespace m2mt
