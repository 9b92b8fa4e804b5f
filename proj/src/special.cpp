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

#include "d3ofdm/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d3ofdm {

double q_exact(double x) {
  if (std::isnan(x)) throw std::invalid_argument("q_exact: x must be finite");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double q_approx(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("q_approx: domain is x >= 0");
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi * (x * x + 1.0));
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("exp_integral_e1: domain is x > 0");
  // E1(x) = -Ei(-x) for x > 0.
  return -std::expint(-x);
}

double bessel_j0(double x) {
  if (std::isnan(x)) throw std::invalid_argument("bessel_j0: x must be finite");
  return std::cyl_bessel_j(0.0, std::fabs(x));
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  return adapt(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), abs_tol, 48);
}

}  // namespace d3ofdm
