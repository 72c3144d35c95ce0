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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace robosetup {

/// Flat "key: value" document. Blank lines and lines starting with '#' are
/// comments; keys are unique and keep their file order.
class ConfigDoc {
 public:
  /// Throws Error(kParse) naming `source` and the line on bad syntax or
  /// duplicate keys.
  static ConfigDoc parse(std::string_view text, std::string_view source = "config");

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool has(std::string_view key) const { return find(key) != nullptr; }
  const std::string* find(std::string_view key) const;

  /// Typed accessors; missing keys and malformed values throw Error(kParse).
  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;

  /// Entries whose key starts with `prefix`, prefix stripped.
  std::vector<std::pair<std::string, std::string>> with_prefix(std::string_view prefix) const;

  void set(std::string key, std::string value);

 private:
  std::string source_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Builds a config document line by line.
class ConfigWriter {
 public:
  ConfigWriter& comment(std::string_view text);
  ConfigWriter& blank();
  ConfigWriter& put(std::string_view key, std::string_view value);
  ConfigWriter& put(std::string_view key, double value);
  ConfigWriter& put_int(std::string_view key, std::int64_t value);

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace robosetup
