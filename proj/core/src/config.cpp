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

#include "m2mt/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "m2mt/tensor_io.hpp"

namespace m2mt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_size(const std::string& value, const std::string& where) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size() || value.empty()) {
    throw std::invalid_argument(where + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw std::invalid_argument(where + ": expected a boolean, got '" + value + "'");
}

using Setter = std::function<void(NetConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto size_field = [](std::size_t NetConfig::*f) -> Setter {
    return [f](NetConfig& c, const std::string& v, const std::string& w) { c.*f = parse_size(v, w); };
  };
  auto bool_field = [](bool NetConfig::*f) -> Setter {
    return [f](NetConfig& c, const std::string& v, const std::string& w) { c.*f = parse_bool(v, w); };
  };
  static const std::map<std::string, Setter> table = {
      {"U", size_field(&NetConfig::u)},
      {"V", size_field(&NetConfig::v)},
      {"C", size_field(&NetConfig::c)},
      {"C_Cor", size_field(&NetConfig::c_cor)},
      {"D", size_field(&NetConfig::d)},
      {"n1", size_field(&NetConfig::n1)},
      {"n2", size_field(&NetConfig::n2)},
      {"r", size_field(&NetConfig::r)},
      {"ffn_ratio", size_field(&NetConfig::ffn_ratio)},
      {"norm", bool_field(&NetConfig::norm)},
      {"ffn", bool_field(&NetConfig::ffn)},
      {"angular_ffn", bool_field(&NetConfig::angular_ffn)},
      {"out_proj", bool_field(&NetConfig::out_proj)},
      {"residual", bool_field(&NetConfig::residual)},
      {"seed",
       [](NetConfig& c, const std::string& v, const std::string& w) {
         std::uint64_t s = 0;
         const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
           throw std::invalid_argument(w + ": expected an unsigned seed, got '" + v + "'");
         }
         c.seed = s;
       }},
      {"flop_convention",
       [](NetConfig& c, const std::string& v, const std::string& w) {
         if (v == "two_per_mac") {
           c.flop_convention = FlopConvention::kTwoPerMac;
         } else if (v == "mac") {
           c.flop_convention = FlopConvention::kMac;
         } else {
           throw std::invalid_argument(w + ": flop_convention must be two_per_mac or mac, got '" + v + "'");
         }
       }},
  };
  return table;
}

}  // namespace

NetConfig parse_config(std::string_view text, const std::string& origin) {
  NetConfig cfg;
  std::set<std::string> seen;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key=value, got '" + body + "'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
    it->second(cfg, value, where + " (" + key + ")");
  }
  if (!seen.count("n2")) cfg.n2 = cfg.r == 2 ? 9 : 8;
  cfg.validate();
  return cfg;
}

NetConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string format_config(const NetConfig& c) {
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "U=" << c.u << "\nV=" << c.v << "\nC=" << c.c << "\nC_Cor=" << c.c_cor << "\nD=" << c.d << "\nn1=" << c.n1
     << "\nn2=" << c.n2 << "\nr=" << c.r << "\nnorm=" << b(c.norm) << "\nffn=" << b(c.ffn)
     << "\nangular_ffn=" << b(c.angular_ffn) << "\nout_proj=" << b(c.out_proj) << "\nresidual=" << b(c.residual)
     << "\nffn_ratio=" << c.ffn_ratio << "\nseed=" << c.seed << "\nflop_convention="
     << (c.flop_convention == FlopConvention::kMac ? "mac" : "two_per_mac") << "\n";
  return os.str();
}

}  // namespace m2mt
