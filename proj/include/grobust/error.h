// Copyright 2026 The grobust Authors.
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

#ifndef GROBUST_ERROR_H_
#define GROBUST_ERROR_H_

#include <stdexcept>
#include <string>

namespace grobust {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of matrices, parameters or label vectors do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument value failed (range, sign, simplex...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable dataset / report file.
class DataError : public Error {
 public:
  using Error::Error;
};

// Soft assignment puts (numerically) all mass on one side of the partition.
class DegenerateAssignmentError : public Error {
 public:
  using Error::Error;
};

// Mixing requested but the assigner produced no minority example.
class EmptyMinorityError : public Error {
 public:
  using Error::Error;
};

// A loss, gradient or parameter became NaN/Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Configuration file problem; carries the offending key and line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message)
      : Error(Format(key, line, message)), key_(key), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string Format(const std::string& key, int line,
                            const std::string& message) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + message;
  }

  std::string key_;
  int line_;
};

}  // namespace grobust

#endif  // GROBUST_ERROR_H_
