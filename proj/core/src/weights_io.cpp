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

#include "m2mt/weights_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace m2mt {

namespace {

constexpr char kMagic[5] = {'M', '2', 'M', 'W', '1'};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw FormatError("M2MW1: bad " + what + " '" + s + "'");
  }
  return std::stoull(s);
}

std::size_t element_size(Dtype d) { return d == Dtype::kF32 ? 4 : 8; }

const Dims& dims_of(const AnyTensor& t) {
  return std::visit([](const auto& x) -> const Dims& { return x.dims(); }, t);
}

const Dims& require(const WeightFile& f, const std::string& name) {
  const AnyTensor* t = f.find(name);
  if (!t) throw FormatError("weights: missing tensor '" + name + "'");
  return dims_of(*t);
}

}  // namespace

const AnyTensor* WeightFile::find(const std::string& name) const {
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (manifest[i].name == name) return &tensors[i];
  }
  return nullptr;
}

template <class T>
void write_weights(std::ostream& os, const std::vector<std::pair<std::string, const Tensor<T>*>>& tensors) {
  std::string manifest;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    if (name.find_first_of("\t\n") != std::string::npos) throw FormatError("M2MW1: tensor name contains TAB/LF");
    manifest += name;
    manifest += '\t';
    manifest += dtype_name(dtype_of<T>());
    manifest += '\t';
    for (std::size_t i = 0; i < t->rank(); ++i) {
      if (i) manifest += ',';
      manifest += std::to_string(t->dim(i));
    }
    manifest += '\t';
    manifest += std::to_string(offset);
    manifest += '\n';
    offset += t->size() * sizeof(T);
  }
  os.write(kMagic, sizeof(kMagic));
  le::put_u32(os, static_cast<std::uint32_t>(manifest.size()));
  os.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  for (const auto& entry : tensors) le::put_values<T>(os, entry.second->data());
  if (!os) throw IoError("write failed while emitting M2MW1 weights");
}

WeightFile read_weights(std::istream& is) {
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || !std::equal(magic, magic + sizeof(magic), kMagic)) {
    throw FormatError("M2MW1: bad magic");
  }
  const std::uint32_t len = le::get_u32(is);
  std::string manifest(len, '\0');
  if (!is.read(manifest.data(), len)) throw FormatError("M2MW1: truncated manifest");
  const std::string payload((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

  WeightFile file;
  for (const std::string& line : split(manifest, '\n')) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 4) throw FormatError("M2MW1: manifest line needs 4 TAB-separated fields: '" + line + "'");
    WeightRecord rec;
    rec.name = fields[0];
    try {
      rec.dtype = parse_dtype_name(fields[1]);
    } catch (const std::exception&) {
      throw FormatError("M2MW1: unknown dtype '" + fields[1] + "' for " + rec.name);
    }
    for (const std::string& d : split(fields[2], ',')) rec.dims.push_back(parse_u64(d, "dim"));
    rec.offset = parse_u64(fields[3], "offset");
    for (const WeightRecord& prev : file.manifest) {
      if (prev.name == rec.name) throw FormatError("M2MW1: duplicate tensor '" + rec.name + "'");
    }

    const std::size_t bytes = numel(rec.dims) * element_size(rec.dtype);
    if (rec.offset > payload.size() || bytes > payload.size() - rec.offset) {
      throw FormatError("M2MW1: payload of '" + rec.name + "' runs past end of file");
    }
    std::istringstream chunk(payload.substr(rec.offset, bytes));
    auto load = [&](auto tag) {
      using V = decltype(tag);
      Tensor<V> t(rec.dims);
      le::get_values<V>(chunk, t.data());
      return AnyTensor(std::move(t));
    };
    try {
      file.tensors.push_back(rec.dtype == Dtype::kF32 ? load(float{}) : load(double{}));
    } catch (const ShapeError& e) {
      throw FormatError("M2MW1: bad dims for '" + rec.name + "': " + e.what());
    }
    file.manifest.push_back(std::move(rec));
  }
  return file;
}

WeightFile read_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_weights(is);
}

template <class T, class Net>
void save_weights(const std::filesystem::path& path, const Net& net) {
  std::vector<std::pair<std::string, const Tensor<T>*>> entries;
  net.visit([&](const std::string& name, const Tensor<T>& t) { entries.emplace_back(name, &t); });
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_weights<T>(os, entries);
}

template <class T, class Net>
void assign_weights(const WeightFile& file, Net& net) {
  net.visit([&](const std::string& name, Tensor<T>& t) {
    const AnyTensor* src = file.find(name);
    if (!src) throw FormatError("weights: missing tensor '" + name + "'");
    std::visit(
        [&](const auto& s) {
          if (s.dims() != t.dims()) {
            throw FormatError("weights: '" + name + "' has dims " + to_string(s.dims()) + ", expected " +
                              to_string(t.dims()));
          }
          t = s.template cast<T>();
        },
        *src);
  });
}

NetConfig infer_config(const WeightFile& file, std::size_t views_u, std::size_t views_v, NetKind* kind,
                       const NetConfig& base) {
  NetConfig cfg = base;
  cfg.u = views_u;
  cfg.v = views_v;

  cfg.n1 = 0;
  while (file.find("head." + std::to_string(cfg.n1) + ".kernel")) ++cfg.n1;
  if (cfg.n1 == 0) throw FormatError("weights: no head convolutions found");
  cfg.c = require(file, "head.0.kernel")[0];

  const bool m2m = file.find("blocks.0.m2mt.encode.weight") != nullptr;
  const bool o2o = file.find("blocks.0.attn.q.weight") != nullptr;
  if (!m2m && !o2o) throw FormatError("weights: no correlation or per-view blocks found");
  if (kind) *kind = m2m ? NetKind::kM2mt : NetKind::kO2o;
  const std::string probe = m2m ? ".m2mt.encode.weight" : ".attn.q.weight";
  cfg.n2 = 0;
  while (file.find("blocks." + std::to_string(cfg.n2) + probe)) ++cfg.n2;

  const std::string blk = m2m ? "blocks.0.m2mt" : "blocks.0";
  cfg.norm = file.find(blk + ".norm1.gain") != nullptr;
  cfg.ffn = file.find(blk + ".ffn.expand.weight") != nullptr;
  cfg.out_proj = file.find(blk + ".attn.out.weight") != nullptr;
  if (m2m) {
    const Dims& enc = require(file, "blocks.0.m2mt.encode.weight");
    cfg.c_cor = enc[1];
    if (enc[0] != views_u * views_v * cfg.c) {
      throw FormatError("weights: encoder expects " + std::to_string(enc[0] / cfg.c) + " views, input has " +
                        std::to_string(views_u * views_v));
    }
    cfg.d = require(file, "blocks.0.m2mt.attn.q.weight")[1];
    cfg.angular_ffn = file.find("blocks.0.angular.ffn.expand.weight") != nullptr;
    if (cfg.ffn) cfg.ffn_ratio = require(file, "blocks.0.m2mt.ffn.expand.weight")[1] / cfg.c_cor;
  } else {
    cfg.angular_ffn = false;
    if (cfg.ffn) cfg.ffn_ratio = require(file, "blocks.0.ffn.expand.weight")[1] / cfg.c;
  }

  const std::size_t expand = require(file, "tail.expand.kernel")[0];
  const auto r = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(expand / cfg.c))));
  if (r * r * cfg.c != expand) throw FormatError("weights: tail expansion is not r*r*C");
  cfg.r = r;
  cfg.validate();
  return cfg;
}

template <class T>
Network<T> load_network(const WeightFile& file, const NetConfig& cfg) {
  Network<T> net = make_network<T>(cfg);
  assign_weights<T>(file, net);
  return net;
}

template <class T>
O2OBaseline<T> load_o2o(const WeightFile& file, const NetConfig& cfg) {
  O2OBaseline<T> net = make_o2o<T>(cfg);
  assign_weights<T>(file, net);
  return net;
}

#define M2MT_INSTANTIATE_WEIGHTS(T)                                                                          \
  template void write_weights(std::ostream&, const std::vector<std::pair<std::string, const Tensor<T>*>>&); \
  template void save_weights<T, Network<T>>(const std::filesystem::path&, const Network<T>&);               \
  template void save_weights<T, O2OBaseline<T>>(const std::filesystem::path&, const O2OBaseline<T>&);       \
  template void assign_weights<T, Network<T>>(const WeightFile&, Network<T>&);                              \
  template void assign_weights<T, O2OBaseline<T>>(const WeightFile&, O2OBaseline<T>&);                      \
  template Network<T> load_network<T>(const WeightFile&, const NetConfig&);                                 \
  template O2OBaseline<T> load_o2o<T>(const WeightFile&, const NetConfig&);

M2MT_INSTANTIATE_WEIGHTS(float)
M2MT_INSTANTIATE_WEIGHTS(double)

}  // namespace m2mt
