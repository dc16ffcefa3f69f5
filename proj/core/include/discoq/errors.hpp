// Copyright 2025 The discoq authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace discoq {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grammar failures: unknown words, sequences that do not reduce to s.
class ParseError : public Error {
  using Error::Error;
};

/// Malformed inputs: files, configs, split specs, dimension mismatches.
class ValidationError : public Error {
  using Error::Error;
};

/// Circuit execution failures: missing slots, degenerate postselection.
class SimulationError : public Error {
  using Error::Error;
};

}  // namespace discoq
