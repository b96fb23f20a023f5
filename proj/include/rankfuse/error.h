/*
 * Copyright 2026 The rankfuse Authors.
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

#ifndef RANKFUSE_ERROR_H_
#define RANKFUSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace rankfuse {

// Invalid arguments, configuration or mismatched shapes supplied by a caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request over data that cannot be processed (duplicate ids,
// degenerate datasets, misaligned matrices).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure to open, read or write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary container problems. Each kind is reported distinctly so callers can
// tell a truncated download from a file of the wrong type.
enum class FormatErrorKind {
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kTrailingData,
  kInconsistent,
};

const char* FormatErrorKindName(FormatErrorKind kind);

class FormatError : public DataError {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : DataError(std::string(FormatErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  FormatErrorKind kind() const { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace rankfuse

#endif  // RANKFUSE_ERROR_H_
