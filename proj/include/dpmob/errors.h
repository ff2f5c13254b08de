// Copyright 2026 The DP Mobility Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMOB_ERRORS_H_
#define DPMOB_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpmob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical or physical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoCandidateError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

// Buffer growth hit the cap before the density thresholds were met.
class SparseNetworkError : public Error {
 public:
  using Error::Error;
};

class UnmatchableError : public Error {
 public:
  using Error::Error;
};

class WindowMismatchError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based; 0 when not tied to a line.
class InputError : public Error {
 public:
  InputError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(Format(source, line, what)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& source, std::size_t line,
                            const std::string& what) {
    if (line == 0) return source + ": " + what;
    return source + ":" + std::to_string(line) + ": " + what;
  }

  std::size_t line_;
};

}  // namespace dpmob

#endif  // DPMOB_ERRORS_H_
