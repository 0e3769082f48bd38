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

#include <filesystem>
#include <string>
#include <string_view>

#include "m2mt/network.hpp"

namespace m2mt {

/// Parses key=value lines into a NetConfig. Blank lines and '#' comments are
/// skipped; unknown keys, repeated keys and malformed values throw
/// std::invalid_argument with the line number. When n2 is absent it follows
/// r (9 for r=2, 8 otherwise).
NetConfig parse_config(std::string_view text, const std::string& origin = "<config>");
NetConfig load_config(const std::filesystem::path& path);

/// Serializes every key; parse_config(format_config(c)) == c.
std::string format_config(const NetConfig& cfg);

}  // namespace m2mt
