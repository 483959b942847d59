/*
 * Copyright 2026 The dynk Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DYNK_CORE_ERROR_HPP_
#define DYNK_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dynk {

// Numeric values match the CLI exit codes and the C API status codes.
enum class ErrorKind {
  kUsage = 1,
  kValidation = 2,
  kIo = 3,
  // Agreement is mathematically undefined (all-zero relevance).
  kUndefined = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_usage(const std::string& message);
[[noreturn]] void throw_validation(const std::string& message);
[[noreturn]] void throw_io(const std::string& message);

}  // namespace dynk

#endif  // DYNK_CORE_ERROR_HPP_
