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

#include <string>
#include <string_view>
#include <vector>

namespace robosetup {

enum class Severity { kError, kWarning, kInfo };

std::string_view to_string(Severity severity);

struct Finding {
  Severity severity = Severity::kInfo;
  std::string element;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  void add(Severity severity, std::string element, std::string message) {
    findings.push_back({severity, std::move(element), std::move(message)});
  }
  std::size_t count(Severity severity) const;
  bool has_errors() const { return count(Severity::kError) > 0; }
  /// One line per finding: "<severity>: <element>: <message>".
  std::string to_text() const;
};

}  // namespace robosetup
