/*
 * Copyright (c) 2026, The strandkit Authors
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

#ifndef STRANDKIT_ERRORS_H_
#define STRANDKIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace strandkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A term was used at a sort it does not have (e.g. encrypting with a
// non-key, or binding a variable to a term of a larger sort).
class SortError : public Error {
 public:
  using Error::Error;
};

// A structural invariant of a domain object does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column,
             const std::string& message)
      : Error(file + ":" + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace strandkit

#endif  // STRANDKIT_ERRORS_H_
