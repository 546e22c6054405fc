// Copyright 2026 The clozebench Authors
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

#ifndef CLOZEBENCH_ERROR_H_
#define CLOZEBENCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace clozebench {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data or configuration. The CLI maps this to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A model or NLP backend failed (unreachable, malformed reply, timeout).
class BackendError : public Error {
 public:
  using Error::Error;
};

// A backend lacks a capability that the configuration requires.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A stage failed past its tolerance. The CLI maps this to exit code 2.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace clozebench

#endif  // CLOZEBENCH_ERROR_H_
