// Copyright 2026 The adatrotter Authors
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

#pragma once

#include <stdexcept>

namespace adatrotter {

/// Numerical failure of an oracle or solver. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An eigenphase of a window propagator is too close to the branch cut of
/// the principal logarithm. Shrink dt.
class BranchError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Refinement did not reach its tolerance within the substep budget.
class ConvergenceError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

} // namespace adatrotter
