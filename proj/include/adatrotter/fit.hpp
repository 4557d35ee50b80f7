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

#include <span>

namespace adatrotter {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

/// Least-squares fit of log(y) against log(x). Points with non-positive
/// x or y are skipped; fewer than two usable points yields points < 2 and a
/// NaN slope.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

} // namespace adatrotter
