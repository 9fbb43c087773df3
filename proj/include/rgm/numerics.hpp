// Copyright 2026 The RGM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

namespace rgm::detail {

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi],
/// stopping when the bracket is below rel_tol * |x| (or rel_tol absolute
/// near zero).
template <std::invocable<double> F>
Minimum GoldenSection(F&& f, double lo, double hi, double rel_tol = 1e-9) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500; ++it) {
    if (b - a <= rel_tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  // The bracket endpoints are valid evaluation points as well.
  Minimum best = fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
  return best;
}

}  // namespace rgm::detail
