// Copyright 2026 The RLD Authors
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

#ifndef RLD_ERRORS_H_
#define RLD_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rld {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (JSON, CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a model invariant. `field` is a dotted path
// into the scenario document, e.g. "storage.B" or "ladder[1].price".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Argument outside the domain of a function (e.g. storage level above B).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Lookup outside a tabulated range (forecast curve horizons).
class RangeError : public Error {
 public:
  using Error::Error;
};

// A threshold equation has no root (prices incompatible with the terminal
// subgradient range) or a root finder failed to bracket.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace rld

#endif  // RLD_ERRORS_H_
