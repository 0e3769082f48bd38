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

#include "m2mt/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "m2mt/metrics.hpp"

namespace m2mt {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& is, const std::string& what) {
  std::string tok;
  for (;;) {
    const int c = is.get();
    if (c == EOF) throw FormatError(what + ": truncated header");
    if (c == '#') {
      std::string ignored;
      std::getline(is, ignored);
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
}

std::size_t header_number(std::istream& is, const std::string& what) {
  const std::string tok = header_token(is, what);
  if (tok.find_first_not_of("0123456789") != std::string::npos) {
    throw FormatError(what + ": malformed header value '" + tok + "'");
  }
  return std::stoul(tok);
}

std::map<std::string, std::string> read_meta(const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::ifstream is(path);
  if (!is) return kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path.string() + ": expected key=value, got '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::size_t meta_number(const std::map<std::string, std::string>& kv, const std::string& key,
                        const std::filesystem::path& path) {
  const std::string& s = kv.at(key);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw FormatError(path.string() + ": " + key + " must be a non-negative integer");
  }
  return std::stoul(s);
}

}  // namespace

std::string view_filename(std::size_t u, std::size_t v) {
  return "view_u" + std::to_string(u) + "_v" + std::to_string(v) + ".pgm";
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  const std::string what = path.string();
  Image img;
  const std::string magic = header_token(is, what);
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw FormatError(what + ": not a binary PGM/PPM (magic '" + magic + "')");
  }
  img.width = header_number(is, what);
  img.height = header_number(is, what);
  const std::size_t maxval = header_number(is, what);
  if (img.width == 0 || img.height == 0) throw FormatError(what + ": zero image extent");
  if (maxval == 0 || maxval > 65535) throw FormatError(what + ": maxval must be in [1, 65535]");
  img.maxval = static_cast<std::uint32_t>(maxval);

  const std::size_t n = img.width * img.height * img.channels;
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::string raw(n * bytes, '\0');
  if (!is.read(raw.data(), static_cast<std::streamsize>(raw.size()))) throw FormatError(what + ": truncated pixel data");
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(raw[i * bytes]);
    img.samples[i] = bytes == 1 ? hi : static_cast<std::uint16_t>((hi << 8) | static_cast<unsigned char>(raw[i * 2 + 1]));
    if (img.samples[i] > maxval) throw FormatError(what + ": sample exceeds maxval");
  }
  return img;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw FormatError("write_pnm: channels must be 1 or 3");
  if (img.samples.size() != img.width * img.height * img.channels) throw FormatError("write_pnm: sample count mismatch");
  if (img.maxval == 0 || img.maxval > 65535) throw FormatError("write_pnm: maxval must be in [1, 65535]");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  const bool wide = img.maxval > 255;
  std::string raw;
  raw.reserve(img.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t s : img.samples) {
    if (wide) raw.push_back(static_cast<char>(s >> 8));
    raw.push_back(static_cast<char>(s & 0xff));
  }
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

Tensor<double> read_luma(const std::filesystem::path& path) {
  const Image img = read_pnm(path);
  const double scale = 1.0 / static_cast<double>(img.maxval);
  Tensor<double> r({img.height, img.width}), g({img.height, img.width}), b({img.height, img.width});
  for (std::size_t i = 0; i < img.width * img.height; ++i) {
    if (img.channels == 1) {
      r[i] = static_cast<double>(img.samples[i]) * scale;
      continue;
    }
    r[i] = static_cast<double>(img.samples[3 * i]) * scale;
    g[i] = static_cast<double>(img.samples[3 * i + 1]) * scale;
    b[i] = static_cast<double>(img.samples[3 * i + 2]) * scale;
  }
  return img.channels == 1 ? r : rgb_to_y(r, g, b);
}

template <class T>
LfTensor<T> central_views(const LfTensor<T>& lf, std::size_t n) {
  const LfShape s = lf.shape();
  if (n == 0 || n > s.u || n > s.v) {
    throw ShapeError("central crop of " + std::to_string(n) + " views exceeds the " + std::to_string(s.u) + "x" +
                     std::to_string(s.v) + " grid");
  }
  const std::size_t u0 = (s.u - n) / 2, v0 = (s.v - n) / 2;
  LfTensor<T> out(LfShape{n, n, s.w, s.h, s.c});
  const std::size_t plane = s.w * s.h * s.c;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      std::copy_n(lf.tensor().ptr() + lf.offset(u0 + u, v0 + v, 0, 0, 0), plane,
                  out.tensor().ptr() + out.offset(u, v, 0, 0, 0));
  return out;
}

template <class T>
LfTensor<T> load_lf(const std::filesystem::path& dir, std::size_t central) {
  if (!std::filesystem::is_directory(dir)) throw IoError("light field directory '" + dir.string() + "' not found");
  const std::filesystem::path meta_path = dir / "meta.txt";
  const auto meta = read_meta(meta_path);
  std::size_t nu = 0, nv = 0;
  if (meta.count("U") && meta.count("V")) {
    nu = meta_number(meta, "U", meta_path);
    nv = meta_number(meta, "V", meta_path);
  } else {
    const std::regex pattern(R"(view_u(\d+)_v(\d+)\.pgm)");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, m, pattern)) continue;
      nu = std::max<std::size_t>(nu, std::stoul(m[1]) + 1);
      nv = std::max<std::size_t>(nv, std::stoul(m[2]) + 1);
    }
  }
  if (nu == 0 || nv == 0) throw FormatError("missing view: " + (dir / view_filename(0, 0)).string());

  LfTensor<T> lf;
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      const std::filesystem::path file = dir / view_filename(u, v);
      if (!std::filesystem::exists(file)) throw FormatError("missing view: " + file.string());
      const Image img = read_pnm(file);
      if (img.channels != 1) throw FormatError(file.string() + ": views must be grayscale PGM");
      if (u == 0 && v == 0) lf = LfTensor<T>(LfShape{nu, nv, img.width, img.height, 1});
      if (img.width != lf.shape().w || img.height != lf.shape().h) {
        throw FormatError("view dims mismatch: " + file.string() + " is " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + ", expected " + std::to_string(lf.shape().w) + "x" +
                          std::to_string(lf.shape().h));
      }
      const T scale = T(1) / static_cast<T>(img.maxval);
      for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) lf(u, v, x, y) = static_cast<T>(img.samples[y * img.width + x]) * scale;
    }
  }
  return central > 0 ? central_views(lf, central) : lf;
}

template <class T>
void save_lf(const LfTensor<T>& lf, const std::filesystem::path& dir, int bitdepth) {
  if (bitdepth != 8 && bitdepth != 16) throw std::invalid_argument("save_lf: bitdepth must be 8 or 16");
  const LfShape s = lf.shape();
  if (s.c != 1) throw ShapeError("save_lf: expected a single-channel light field");
  std::filesystem::create_directories(dir);
  const std::uint32_t maxval = bitdepth == 8 ? 255 : 65535;
  for (std::size_t u = 0; u < s.u; ++u) {
    for (std::size_t v = 0; v < s.v; ++v) {
      Image img;
      img.width = s.w;
      img.height = s.h;
      img.maxval = maxval;
      img.samples.resize(s.w * s.h);
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x = 0; x < s.w; ++x) {
          const double t = std::clamp(static_cast<double>(lf(u, v, x, y)), 0.0, 1.0);
          img.samples[y * s.w + x] = static_cast<std::uint16_t>(std::lround(t * maxval));
        }
      write_pnm(dir / view_filename(u, v), img);
    }
  }
  std::ofstream meta(dir / "meta.txt");
  meta << "U=" << s.u << "\nV=" << s.v << "\nbitdepth=" << bitdepth << "\n";
  if (!meta) throw IoError("cannot write meta.txt in '" + dir.string() + "'");
}

template <class T>
LfTensor<T> load_lf_any(const std::filesystem::path& path, std::size_t central) {
  if (std::filesystem::is_directory(path)) return load_lf<T>(path, central);
  Tensor<T> t = read_lft_as<T>(path);
  if (t.rank() != 5) throw FormatError(path.string() + ": light field tensors must have 5 dims");
  LfTensor<T> lf(std::move(t));
  return central > 0 ? central_views(lf, central) : lf;
}

#define M2MT_INSTANTIATE_IMAGE_IO(T)                                                      \
  template LfTensor<T> central_views(const LfTensor<T>&, std::size_t);                   \
  template LfTensor<T> load_lf(const std::filesystem::path&, std::size_t);               \
  template void save_lf(const LfTensor<T>&, const std::filesystem::path&, int);          \
  template LfTensor<T> load_lf_any(const std::filesystem::path&, std::size_t);

M2MT_INSTANTIATE_IMAGE_IO(float)
M2MT_INSTANTIATE_IMAGE_IO(double)

}  // namespace m2mt
