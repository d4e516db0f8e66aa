/**
 * Copyright 2026 The votekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOTEKIT_ERROR_HPP_
#define VOTEKIT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace votekit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant (CLI exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. Carries the 1-based line number (CLI exit code 2).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File system failure (CLI exit code 2).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace votekit

#endif  // VOTEKIT_ERROR_HPP_
