// Copyright 2026 The looploc Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace looploc {

/// Base class for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loop phase is time dependent because the multiphoton detuning is nonzero.
class NonStaticPhase : public Error {
 public:
  using Error::Error;
};

/// The generator has more than one stationary state.
class DegenerateSteadyState : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Population of |2> too small for the fluorescence ratio to be defined.
class VanishingDenominator : public Error {
 public:
  using Error::Error;
};

/// Measured ratio lies outside the range of the ratio curve.
class NoSolution : public Error {
 public:
  using Error::Error;
};

/// Magnification is zero, so the loop phase carries no position information.
class ZeroMagnification : public Error {
 public:
  using Error::Error;
};

/// More than one candidate position falls inside the prior interval.
class AmbiguousBranch : public Error {
 public:
  AmbiguousBranch(const std::string& what, std::size_t stage = 0)
      : Error(what), stage_(stage) {}

  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

/// Invalid scenario configuration; message carries the offending field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace looploc
