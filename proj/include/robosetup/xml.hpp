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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace robosetup::xml {

/// Element node of a parsed document. Attribute order follows the source.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Element>> children;
  int line = 0;

  const std::string* attribute(std::string_view key) const;
  /// Children with the given tag, in document order.
  std::vector<const Element*> children_named(std::string_view tag) const;
  const Element* first_child(std::string_view tag) const;
};

/// Parses a complete document and returns its root element.
/// Throws Error(kParse) with the line number on malformed input.
std::unique_ptr<Element> parse(std::string_view text);

using Attrs = std::vector<std::pair<std::string, std::string>>;

/// Streaming writer with fixed two-space indentation. Attributes are
/// emitted in the order given, so output is byte-deterministic.
class Writer {
 public:
  Writer();

  Writer& open(std::string_view tag, const Attrs& attrs = {});
  Writer& empty(std::string_view tag, const Attrs& attrs);
  Writer& close();

  std::string str() const { return out_; }

 private:
  void write_start(std::string_view tag, const Attrs& attrs);

  std::string out_;
  std::vector<std::string> stack_;
};

std::string escape(std::string_view text);

}  // namespace robosetup::xml
