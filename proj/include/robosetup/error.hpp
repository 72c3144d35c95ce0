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

#include <stdexcept>
#include <string>
#include <string_view>

namespace robosetup {

// Shared error taxonomy. The service maps these to HTTP statuses and the CLI
// to exit codes, so every layer reports failures the same way.
enum class ErrorCode {
  kParse,        // malformed input document
  kValidation,   // well-formed input that breaks an invariant
  kNotFound,     // unknown name, job, pose or missing project
  kConflict,     // concurrent job, refused overwrite
  kIo,           // filesystem failure
  kPlanFailed,   // planner produced no solution
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string element = {})
      : std::runtime_error(std::move(message)), code_(code), element_(std::move(element)) {}

  ErrorCode code() const noexcept { return code_; }
  // Name of the offending document element, joint, link or field, if any.
  const std::string& element() const noexcept { return element_; }

 private:
  ErrorCode code_;
  std::string element_;
};

}  // namespace robosetup
