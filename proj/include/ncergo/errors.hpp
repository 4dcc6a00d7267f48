// Copyright 2026 The ncergo Authors
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

namespace ncergo {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element or map shapes do not conform to the space they are used with.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the operation's domain (bad p, bad level index).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition failed, e.g. asking for the state adjoint of
/// a map that does not commute with the modular groups.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A fixture could not be built: non-faithful state, non-stochastic matrix,
/// degenerate transition system.
class FixtureError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (word count, tower size) would be exceeded.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

/// A verification step found the computed object violates a required
/// algebraic property (closure of a subalgebra, pairing residual).
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncergo
