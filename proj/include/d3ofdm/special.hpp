// SPDX-License-Identifier: Apache-2.0
//
// d3ofdm: link-level OFDM simulation library with direct data detection
// Copyright (C) 2026 the d3ofdm contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef D3OFDM_SPECIAL_HPP
#define D3OFDM_SPECIAL_HPP

#include <functional>

namespace d3ofdm {

/// Gaussian tail probability Q(x) = P(N(0,1) > x), via erfc.
double q_exact(double x);

/// Small-footprint tail approximation exp(-x^2/2)/sqrt(2*pi*(x^2+1)),
/// defined for x >= 0 only; negative arguments are rejected.
double q_approx(double x);

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
/// Relative error below 1e-10 over the supported domain.
double exp_integral_e1(double x);

/// Bessel function of the first kind, order zero. Even in x.
/// Absolute error below 1e-10 for |x| <= 50.
double bessel_j0(double x);

/// Adaptive Simpson quadrature on [a, b] to the given absolute tolerance.
/// Deterministic, no state; used by the error-rate quadrature routes.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

}  // namespace d3ofdm

#endif
