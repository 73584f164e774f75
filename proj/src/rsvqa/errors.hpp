// Copyright 2026 The rsvqa Authors
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

#ifndef RSVQA_ERRORS_HPP_
#define RSVQA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rsvqa {

// Error categories line up with the CLI exit-code contract.
enum class ErrorKind {
  kUsage = 1,     // bad arguments or configuration
  kData = 2,      // malformed or inconsistent input data
  kExternal = 3,  // translation service, network, filesystem
  kRuntime = 4,   // numerical failure during training and similar
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class ExternalError : public Error {
 public:
  explicit ExternalError(const std::string& what)
      : Error(ErrorKind::kExternal, what) {}
};

class RuntimeError : public Error {
 public:
  explicit RuntimeError(const std::string& what)
      : Error(ErrorKind::kRuntime, what) {}
};

}  // namespace rsvqa

#endif  // RSVQA_ERRORS_HPP_
