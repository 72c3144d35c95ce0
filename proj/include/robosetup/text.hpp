// Copyright 2026 The robosetup Authors
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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robosetup {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
/// Fixed 17 significant digits ("%.17g"), for tabular output.
std::string format_double17(double value);
/// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Whitespace-separated tokens.
std::vector<std::string> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace robosetup
