// Copyright 2026 The asymnet Authors
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

#ifndef ASYMNET_ERROR_HPP
#define ASYMNET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asymnet {

/// Error categories. The C API maps these one-to-one onto asym_status codes.
enum class ErrorKind {
  kDomain = 1,   // argument outside the mathematical domain
  kShape,        // matrix / vector dimension mismatch
  kNumeric,      // non-finite values, failed factorization
  kDivergence,   // training produced NaN/Inf
  kParse,        // malformed input text
  kSchema,       // well-formed input with the wrong structure
  kAssumption,   // dataset violates a modelling assumption
  kConfig,       // inconsistent configuration
  kIo,           // filesystem failure
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the training loop; carries the step at which the loss went non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error(ErrorKind::kDivergence, what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace asymnet

#endif  // ASYMNET_ERROR_HPP
