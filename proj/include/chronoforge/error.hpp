/*
 * Copyright 2026 The Chronoforge Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chronoforge {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, bad parameters, missing prerequisite artifacts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates the declared schema or an invariant.
class DataError : public Error {
 public:
  DataError(std::string kind, std::string entity, std::string column, std::size_t row,
            const std::string& detail = {})
      : Error(format(kind, entity, column, row, detail)),
        kind_(std::move(kind)),
        entity_(std::move(entity)),
        column_(std::move(column)),
        row_(row) {}

  explicit DataError(const std::string& message) : Error(message), kind_("DataError") {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& entity() const noexcept { return entity_; }
  const std::string& column() const noexcept { return column_; }
  std::size_t row() const noexcept { return row_; }

 private:
  static std::string format(const std::string& kind, const std::string& entity,
                            const std::string& column, std::size_t row,
                            const std::string& detail) {
    std::string s = kind + "(" + entity;
    if (!column.empty()) s += ", " + column;
    if (row != 0) s += ", row " + std::to_string(row);
    s += ")";
    if (!detail.empty()) s += ": " + detail;
    return s;
  }

  std::string kind_;
  std::string entity_;
  std::string column_;
  std::size_t row_ = 0;
};

// Structural JSON violation; pointer() is an RFC 6901 JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// Text that fails a grammar; position is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace chronoforge
