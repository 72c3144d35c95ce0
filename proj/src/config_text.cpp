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

#include "robosetup/config_text.hpp"

#include "robosetup/error.hpp"
#include "robosetup/text.hpp"

namespace robosetup {

ConfigDoc ConfigDoc::parse(std::string_view text, std::string_view source) {
  ConfigDoc doc;
  doc.source_ = source;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (colon == std::string_view::npos) throw Error(ErrorCode::kParse, where + ": expected 'key: value'", where);
    std::string key(trim(line.substr(0, colon)));
    std::string value(trim(line.substr(colon + 1)));
    if (key.empty()) throw Error(ErrorCode::kParse, where + ": empty key", where);
    if (doc.find(key) != nullptr) throw Error(ErrorCode::kParse, where + ": duplicate key '" + key + "'", key);
    doc.entries_.emplace_back(std::move(key), std::move(value));
  }
  return doc;
}

const std::string* ConfigDoc::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& ConfigDoc::get(std::string_view key) const {
  const std::string* v = find(key);
  if (v == nullptr) {
    throw Error(ErrorCode::kParse, source_ + ": missing key '" + std::string(key) + "'", std::string(key));
  }
  return *v;
}

double ConfigDoc::get_double(std::string_view key) const {
  const auto v = parse_double(get(key));
  if (!v) throw Error(ErrorCode::kParse, source_ + ": '" + std::string(key) + "' is not a number", std::string(key));
  return *v;
}

double ConfigDoc::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigDoc::get_int(std::string_view key) const {
  const auto v = parse_int(get(key));
  if (!v) throw Error(ErrorCode::kParse, source_ + ": '" + std::string(key) + "' is not an integer", std::string(key));
  return *v;
}

std::int64_t ConfigDoc::get_int(std::string_view key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::string ConfigDoc::get_string(std::string_view key, std::string_view fallback) const {
  const std::string* v = find(key);
  return v != nullptr ? *v : std::string(fallback);
}

std::vector<std::pair<std::string, std::string>> ConfigDoc::with_prefix(std::string_view prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : entries_) {
    if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) out.emplace_back(k.substr(prefix.size()), v);
  }
  return out;
}

void ConfigDoc::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

ConfigWriter& ConfigWriter::comment(std::string_view text) {
  out_ += "# ";
  out_ += text;
  out_ += '\n';
  return *this;
}

ConfigWriter& ConfigWriter::blank() {
  out_ += '\n';
  return *this;
}

ConfigWriter& ConfigWriter::put(std::string_view key, std::string_view value) {
  out_ += key;
  out_ += ": ";
  out_ += value;
  out_ += '\n';
  return *this;
}

ConfigWriter& ConfigWriter::put(std::string_view key, double value) { return put(key, format_double(value)); }

ConfigWriter& ConfigWriter::put_int(std::string_view key, std::int64_t value) {
  return put(key, std::to_string(value));
}

}  // namespace robosetup
