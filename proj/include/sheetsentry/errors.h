// Copyright 2026 The SheetSentry Authors.
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

#ifndef SHEETSENTRY_ERRORS_H_
#define SHEETSENTRY_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetsentry {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AddressParseError : public Error {
 public:
  explicit AddressParseError(std::string input)
      : Error("malformed cell address '" + input + "'"),
        input_(std::move(input)) {}
  const std::string& input() const { return input_; }

 private:
  std::string input_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Schema violation in an input document. `json_path` is a JSON pointer to the
// offending element ("" for the document root).
class FormatError : public Error {
 public:
  FormatError(std::string json_path, const std::string& what)
      : Error((json_path.empty() ? std::string("/") : json_path) + ": " +
              what),
        json_path_(std::move(json_path)),
        detail_(what) {}
  const std::string& json_path() const { return json_path_; }
  // The message without the path prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::string json_path_;
  std::string detail_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LexError : public Error {
 public:
  LexError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& what)
      : Error(Describe(offset, expected, what)),
        offset_(offset),
        expected_(std::move(expected)) {}

  // Rethrown with the cell that owns the formula prefixed to the message.
  ParseError(const std::string& cell, const ParseError& inner)
      : Error(cell + ": " + inner.what()),
        offset_(inner.offset_),
        expected_(inner.expected_),
        cell_(cell) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  // Empty unless the error was attributed to a workbook cell.
  const std::string& cell() const { return cell_; }

 private:
  static std::string Describe(std::size_t offset,
                              const std::vector<std::string>& expected,
                              const std::string& what) {
    std::string out = "offset " + std::to_string(offset) + ": " + what;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string cell_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

}  // namespace sheetsentry

#endif  // SHEETSENTRY_ERRORS_H_
