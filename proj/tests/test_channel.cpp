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

#include "d3ofdm/channel.hpp"
#include "d3ofdm/special.hpp"

using namespace d3ofdm;

TEST_CASE("profiles: named entries and normalization") {
  const TapProfile tux6 = TapProfile::named("tux6");
  CHECK(tux6.delays == std::vector<int>{0, 2, 3, 9, 13, 29});
  CHECK(tux6.powers.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tux6.powers[1] == doctest::Approx(0.398).epsilon(1e-9));

  const TapProfile tux9 = TapProfile::named("tux9");
  CHECK(tux9.tap_count() == 9);
  CHECK(tux9.max_delay() == 8);

  CHECK_THROWS_AS(TapProfile::named("urban-x"), std::invalid_argument);
  CHECK_THROWS_AS(TapProfile::custom({0, 0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TapProfile::custom({0, 1}, {0.5, -0.5}), std::invalid_argument);
}

TEST_CASE("sample_realization: flat profile gives a flat response") {
  RngStream rng(11, 0);
  const ChannelRealization cr = sample_realization(TapProfile::named("flat"), 64, rng);
  for (int v = 0; v < 64; ++v) CHECK(std::abs(cr.cfr[v] - cr.taps[0]) < 1e-12);
}

TEST_CASE("sample_realization: response equals the direct transform sum") {
  RngStream rng(12, 0);
  const TapProfile p = TapProfile::named("tux6");
  for (int draw = 0; draw < 10; ++draw) {
    const ChannelRealization cr = sample_realization(p, 512, rng);
    for (int v = 0; v < 512; v += 37) {
      std::complex<double> ref = 0.0;
      for (int i = 0; i < p.tap_count(); ++i) {
        const double a = -2.0 * std::numbers::pi * p.delays[static_cast<std::size_t>(i)] * v / 512.0;
        ref += cr.taps[i] * std::complex<double>{std::cos(a), std::sin(a)};
      }
      CHECK(std::abs(cr.cfr[v] - ref) < 1e-10);
    }
  }
}

TEST_CASE("sample_realization: unit average gain per subcarrier") {
  RngStream rng(13, 0);
  const TapProfile p = TapProfile::named("tux6");
  double acc = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    // E[|H_v|^2] at a fixed bin equals the tap power sum; evaluate directly.
    std::complex<double> h = 0.0;
    for (int t = 0; t < p.tap_count(); ++t) {
      const double a = -2.0 * std::numbers::pi * p.delays[static_cast<std::size_t>(t)] * 17 / 512.0;
      h += rng.next_cgauss(p.powers[t]) * std::complex<double>{std::cos(a), std::sin(a)};
    }
    acc += std::norm(h);
  }
  acc /= draws;
  CHECK(acc > 0.99);
  CHECK(acc < 1.01);
}

TEST_CASE("freq_correlation: flat, two-tap, and large-N limits") {
  CHECK(std::abs(freq_correlation(TapProfile::named("flat"), 512) - 1.0) < 1e-15);

  const TapProfile two = TapProfile::custom({0, 1}, {0.5, 0.5});
  const std::complex<double> expect =
      0.5 + 0.5 * std::exp(std::complex<double>{0.0, 2.0 * std::numbers::pi / 512.0});
  CHECK(std::abs(freq_correlation(two, 512) - expect) < 1e-14);

  const TapProfile tux6 = TapProfile::named("tux6");
  double prev = std::abs(freq_correlation(tux6, 64));
  for (int n = 128; n <= 8192; n *= 2) {
    const double cur = std::abs(freq_correlation(tux6, n));
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev > 0.9999);

  // Larger delay spread decorrelates adjacent bins faster.
  CHECK(std::abs(freq_correlation(TapProfile::named("tux6"), 512)) <
        std::abs(freq_correlation(TapProfile::named("tux9"), 512)));
}

TEST_CASE("freq_difference: flat zero, scaling, severity ordering") {
  CHECK(std::abs(freq_difference(TapProfile::named("flat"), 512)) < 1e-15);

  const TapProfile two = TapProfile::custom({0, 1}, {0.5, 0.5});
  for (int n : {512, 2048, 8192}) {
    const double mag = std::abs(freq_difference(two, n));
    const double expected = std::abs(0.5 * (1.0 - std::exp(std::complex<double>{
                                                 0.0, -2.0 * std::numbers::pi / n})));
    CHECK(mag == doctest::Approx(expected).epsilon(1e-12));
    CHECK(mag == doctest::Approx(std::numbers::pi / n).epsilon(1e-4));
  }

  CHECK(std::abs(freq_difference(TapProfile::named("tux6"), 512)) >
        std::abs(freq_difference(TapProfile::named("tux9"), 512)));
}

TEST_CASE("time_correlation: static limit and the 300 km/h anchor") {
  MobilityModel still = MobilityModel::stationary(75e-6);
  CHECK(time_correlation(still) == doctest::Approx(1.0).epsilon(1e-15));

  const MobilityModel fast = MobilityModel::from_speed(300.0 / 3.6, 1.9e9, 75e-6);
  CHECK(fast.doppler_hz == doctest::Approx(527.7778).epsilon(1e-4));
  CHECK(time_correlation(fast) ==
        doctest::Approx(bessel_j0(2.0 * std::numbers::pi * fast.doppler_hz * 75e-6))
            .epsilon(1e-15));

  // Monotone decrease across the first Bessel lobe as speed grows.
  double prev = 1.0;
  for (double v = 20.0; v <= 300.0; v += 40.0) {
    const double rho = time_correlation(MobilityModel::from_speed(v / 3.6, 1.9e9, 75e-6));
    CHECK(rho < prev);
    prev = rho;
  }
}

TEST_CASE("evolve: zero Doppler replicates the input") {
  RngStream rng(20, 0);
  const ChannelRealization cr = sample_realization(TapProfile::named("tux6"), 64, rng);
  const auto seq = evolve(cr, MobilityModel::stationary(75e-6), 5, rng);
  REQUIRE(seq.size() == 5);
  for (const auto& s : seq) {
    CHECK((s.taps - cr.taps).abs().maxCoeff() == 0.0);
    CHECK((s.cfr - cr.cfr).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("evolve: lag-one autocorrelation tracks the Doppler spectrum") {
  const double fd_t = 0.05;  // normalized Doppler per step
  MobilityModel model = MobilityModel::stationary(1e-3);
  model.doppler_hz = fd_t / model.symbol_period_s;

  RngStream rng(21, 0);
  const TapProfile flat = TapProfile::named("flat");
  std::complex<double> num = 0.0;
  double den = 0.0;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) {
    const ChannelRealization cr = sample_realization(flat, 2, rng);
    const auto seq = evolve(cr, model, 2, rng);
    num += seq[0].taps[0] * std::conj(seq[1].taps[0]);
    den += std::norm(seq[0].taps[0]);
  }
  const double rho = (num / den).real();
  const double j0 = bessel_j0(2.0 * std::numbers::pi * fd_t);
  CHECK(std::fabs(rho - j0) < 0.02);
}

TEST_CASE("evolve: preserves tap powers and cross-tap independence") {
  MobilityModel model = MobilityModel::stationary(75e-6);
  model.doppler_hz = 500.0;
  RngStream rng(22, 0);
  const TapProfile two = TapProfile::custom({0, 3}, {0.7, 0.3});
  double p0 = 0.0, p1 = 0.0;
  std::complex<double> cross = 0.0;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) {
    const ChannelRealization cr = sample_realization(two, 8, rng);
    const auto seq = evolve(cr, model, 4, rng);
    p0 += std::norm(seq[3].taps[0]);
    p1 += std::norm(seq[3].taps[1]);
    cross += seq[3].taps[0] * std::conj(seq[3].taps[1]);
  }
  CHECK(std::fabs(p0 / runs - 0.7) < 0.01);
  CHECK(std::fabs(p1 / runs - 0.3) < 0.01);
  CHECK(std::abs(cross) / std::sqrt(p0 * p1) < 0.02);

  CHECK_THROWS_AS(evolve(sample_realization(two, 8, rng), model, 0, rng),
                  std::invalid_argument);
}
