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

#include "core/error.hpp"

namespace dynk {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void throw_usage(const std::string& message) {
  throw Error(ErrorKind::kUsage, message);
}

void throw_validation(const std::string& message) {
  throw Error(ErrorKind::kValidation, message);
}

void throw_io(const std::string& message) {
  throw Error(ErrorKind::kIo, message);
}

}  // namespace dynk
