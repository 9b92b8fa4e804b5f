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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "d3ofdm/fft.hpp"
#include "d3ofdm/rng.hpp"
#include "d3ofdm/special.hpp"

using namespace d3ofdm;

namespace {

Eigen::ArrayXcd random_vector(RngStream& rng, int n) {
  Eigen::ArrayXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.next_cgauss(1.0);
  return x;
}

}  // namespace

TEST_CASE("fft: unit impulse spreads flat under unitary scaling") {
  Eigen::ArrayXcd x = Eigen::ArrayXcd::Zero(4);
  x[0] = 1.0;
  const Eigen::ArrayXcd y = fft(x);
  for (int i = 0; i < 4; ++i) {
    CHECK(y[i].real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(y[i].imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("fft: round trip and Parseval on random inputs") {
  RngStream rng(42, 0);
  for (int n : {2, 8, 64, 512}) {
    const Eigen::ArrayXcd x = random_vector(rng, n);
    const Eigen::ArrayXcd y = fft(x);
    CHECK(std::abs(std::sqrt(y.abs2().sum()) - std::sqrt(x.abs2().sum())) < 1e-12);
    const Eigen::ArrayXcd back = fft(y, /*inverse=*/true);
    CHECK((back - x).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fft: matches the direct transform sum") {
  RngStream rng(7, 1);
  const int n = 16;
  const Eigen::ArrayXcd x = random_vector(rng, n);
  const Eigen::ArrayXcd y = fft(x);
  for (int v = 0; v < n; ++v) {
    std::complex<double> ref = 0.0;
    for (int t = 0; t < n; ++t) {
      const double a = -2.0 * std::numbers::pi * v * t / n;
      ref += x[t] * std::complex<double>{std::cos(a), std::sin(a)};
    }
    ref /= std::sqrt(static_cast<double>(n));
    CHECK(std::abs(y[v] - ref) < 1e-12);
  }
}

TEST_CASE("fft: rejects unsupported lengths") {
  CHECK_THROWS_AS(fft(Eigen::ArrayXcd::Zero(12)), std::invalid_argument);
  CHECK_THROWS_AS(fft(Eigen::ArrayXcd::Zero(1)), std::invalid_argument);
  CHECK_THROWS_AS(fft(Eigen::ArrayXcd::Zero(0)), std::invalid_argument);
}

TEST_CASE("q_exact: anchor values and symmetry") {
  CHECK(q_exact(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q_exact(-10.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Independent quadrature of the defining integral at x = 1.
  const double by_quadrature =
      integrate([](double t) { return std::exp(-0.5 * t * t); }, 1.0, 12.0, 1e-13) /
      std::sqrt(2.0 * std::numbers::pi);
  CHECK(q_exact(1.0) == doctest::Approx(by_quadrature).epsilon(1e-10));
  CHECK(q_exact(1.0) == doctest::Approx(0.158655253931457).epsilon(1e-12));
  for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5})
    CHECK(q_exact(x) + q_exact(-x) == doctest::Approx(1.0).epsilon(1e-14));
  double prev = 1.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    CHECK(q_exact(x) < prev);
    prev = q_exact(x);
  }
}

TEST_CASE("q_approx: definition, domain, and accuracy envelope") {
  CHECK(q_approx(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  const double x = 10.0;
  CHECK(q_approx(x) ==
        doctest::Approx(std::exp(-50.0) / std::sqrt(2.0 * std::numbers::pi * 101.0)).epsilon(1e-15));
  CHECK_THROWS_AS(q_approx(-0.1), std::invalid_argument);
  CHECK(q_approx(3.0) / q_exact(3.0) > 0.9);
  CHECK(q_approx(3.0) / q_exact(3.0) < 1.1);
  // Relative error shrinks with x: below 30% at 0.5, below 5% from 3 on.
  CHECK(std::fabs(q_approx(0.5) / q_exact(0.5) - 1.0) < 0.30);
  for (double xx : {3.0, 4.0, 6.0, 10.0})
    CHECK(std::fabs(q_approx(xx) / q_exact(xx) - 1.0) < 0.05);
}

TEST_CASE("exp_integral_e1: quadrature anchor, asymptotics, monotonicity") {
  // Adaptive quadrature of the defining integral (split for the tail).
  auto e1_ref = [](double x) {
    return integrate([](double t) { return std::exp(-t) / t; }, x, x + 60.0, 1e-14);
  };
  CHECK(exp_integral_e1(1.0) == doctest::Approx(e1_ref(1.0)).epsilon(1e-10));
  CHECK(exp_integral_e1(1.0) == doctest::Approx(0.21938393439552029).epsilon(1e-10));
  CHECK(exp_integral_e1(0.3) == doctest::Approx(e1_ref(0.3)).epsilon(1e-10));
  // x e^x E1(x) -> 1 for large x.
  CHECK(std::fabs(50.0 * std::exp(50.0) * exp_integral_e1(50.0) - 1.0) < 0.02);
  double prev = exp_integral_e1(0.05);
  for (double x = 0.1; x < 12.0; x += 0.37) {
    const double cur = exp_integral_e1(x);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::invalid_argument);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::invalid_argument);
}

TEST_CASE("bessel_j0: anchors, parity, series cross-check") {
  CHECK(bessel_j0(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(bessel_j0(2.404825557695773)) < 1e-10);
  for (double x : {0.3, 1.7, 5.0, 24.5})
    CHECK(bessel_j0(-x) == doctest::Approx(bessel_j0(x)).epsilon(1e-15));
  // Power series oracle on small arguments.
  for (double x : {0.1, 0.9, 2.0, 4.0}) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
      term *= -(x * x) / (4.0 * k * k);
      sum += term;
    }
    CHECK(bessel_j0(x) == doctest::Approx(sum).epsilon(1e-12));
  }
  CHECK(std::fabs(bessel_j0(50.0) - 0.05581232766925) < 1e-10);
}

TEST_CASE("rng: reproducibility and stream independence") {
  RngStream a(123, 5), b(123, 5), c(123, 6);
  bool identical = true, differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    identical = identical && (va == b.next_u64());
    differs = differs || (va != c.next_u64());
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("rng: complex Gaussian moments") {
  RngStream rng(2024, 0);
  const int n = 1000000;
  double p = 0.0, re = 0.0, im = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.next_cgauss(2.0);
    p += std::norm(z);
    re += z.real();
    im += z.imag();
  }
  p /= n;
  CHECK(p > 1.98);
  CHECK(p < 2.02);
  CHECK(std::fabs(re / n) < 0.01);
  CHECK(std::fabs(im / n) < 0.01);
  CHECK_THROWS_AS(rng.next_cgauss(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.next_cgauss(-1.0), std::invalid_argument);
}
