// Copyright 2026 The NSM Authors.
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

#ifndef NSM_ERROR_HPP_
#define NSM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace nsm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (ragged rows, bad layout).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A cell that is neither a number nor the missing token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t row, std::size_t col)
      : Error(message), row_(row), col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A node with no observed edges cannot be placed in a community.
class ColdStartError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsm

#endif  // NSM_ERROR_HPP_
