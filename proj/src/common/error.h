// Copyright 2026 The Chrononer Authors.
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

#ifndef CHRONONER_COMMON_ERROR_H_
#define CHRONONER_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace chrononer {

// Base class of all errors raised by the library. The subclasses map onto
// the process exit codes used by the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or usage, unknown names (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, inconsistent or missing input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite losses and similar numerical breakdowns (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace chrononer

#endif  // CHRONONER_COMMON_ERROR_H_
