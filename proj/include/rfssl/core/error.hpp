/*
 * Copyright 2026 The rfssl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfssl {

/// Coarse failure category. The CLI prints it as the first token of the
/// single-line error message, so the names are part of the external surface.
enum class ErrorCategory {
  invalid_argument,
  shape_mismatch,
  numeric,
  format,
  io,
  config,
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorCategory::invalid_argument, message) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& message)
      : Error(ErrorCategory::shape_mismatch, message) {}
};

/// Non-finite values where finite ones are required (gradients, losses).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorCategory::numeric, message) {}
};

/// A file was readable but its contents are not a valid container.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error(ErrorCategory::format, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::io, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::config, message) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace rfssl
