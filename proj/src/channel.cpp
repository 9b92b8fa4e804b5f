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

#include "d3ofdm/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d3ofdm/fft.hpp"
#include "d3ofdm/special.hpp"

namespace d3ofdm {

TapProfile TapProfile::custom(std::vector<int> delays, std::vector<double> powers) {
  if (delays.empty() || delays.size() != powers.size())
    throw std::invalid_argument("TapProfile: need matching, non-empty delays/powers");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] < 0) throw std::invalid_argument("TapProfile: negative delay");
    if (i > 0 && delays[i] <= delays[i - 1])
      throw std::invalid_argument("TapProfile: delays must be strictly increasing");
    if (!(powers[i] > 0.0)) throw std::invalid_argument("TapProfile: powers must be positive");
  }
  TapProfile p;
  p.delays = std::move(delays);
  p.powers = Eigen::Map<const Eigen::ArrayXd>(powers.data(),
                                              static_cast<Eigen::Index>(powers.size()));
  p.powers /= p.powers.sum();
  return p;
}

TapProfile TapProfile::named(std::string_view name) {
  if (name == "flat") return custom({0}, {1.0});
  if (name == "tux6")
    return custom({0, 2, 3, 9, 13, 29}, {0.2, 0.398, 0.2, 0.1, 0.063, 0.039});
  if (name == "tux9")
    return custom({0, 1, 2, 3, 4, 5, 6, 7, 8},
                  {0.269, 0.174, 0.289, 0.117, 0.023, 0.058, 0.036, 0.026, 0.008});
  throw std::invalid_argument("TapProfile::named: unknown profile '" + std::string(name) + "'");
}

Eigen::ArrayXcd cfr_from_taps(const std::vector<int>& delays, const Eigen::ArrayXcd& taps,
                              int n_subcarriers) {
  if (!is_pow2(n_subcarriers))
    throw std::invalid_argument("cfr_from_taps: subcarrier count must be a power of two");
  if (delays.back() >= n_subcarriers)
    throw std::invalid_argument("cfr_from_taps: tap delay beyond FFT length");
  Eigen::ArrayXcd padded = Eigen::ArrayXcd::Zero(n_subcarriers);
  for (std::size_t i = 0; i < delays.size(); ++i)
    padded[delays[i]] = taps[static_cast<Eigen::Index>(i)];
  // Unitary FFT times sqrt(N) gives the plain DFT sum.
  Eigen::ArrayXcd h = fft(padded, false);
  h *= std::sqrt(static_cast<double>(n_subcarriers));
  return h;
}

ChannelRealization sample_realization(const TapProfile& profile, int n_subcarriers,
                                      RngStream& rng) {
  ChannelRealization cr;
  cr.delays = profile.delays;
  cr.powers = profile.powers;
  cr.taps.resize(profile.tap_count());
  for (int i = 0; i < profile.tap_count(); ++i)
    cr.taps[i] = rng.next_cgauss(profile.powers[i]);
  cr.cfr = cfr_from_taps(cr.delays, cr.taps, n_subcarriers);
  return cr;
}

Eigen::ArrayXcd sample_cfr_window(const TapProfile& profile, int n_subcarriers, int v0,
                                  int len, RngStream& rng) {
  Eigen::ArrayXcd h = Eigen::ArrayXcd::Zero(len);
  for (int i = 0; i < profile.tap_count(); ++i) {
    const std::complex<double> tap = rng.next_cgauss(profile.powers[i]);
    const double step = -2.0 * std::numbers::pi * profile.delays[i] / n_subcarriers;
    const std::complex<double> rot{std::cos(step), std::sin(step)};
    std::complex<double> phase{std::cos(step * v0), std::sin(step * v0)};
    for (int v = 0; v < len; ++v) {
      h[v] += tap * phase;
      phase *= rot;
    }
  }
  return h;
}

std::complex<double> freq_correlation(const TapProfile& profile, int n_subcarriers) {
  std::complex<double> rho = 0.0;
  for (int i = 0; i < profile.tap_count(); ++i) {
    const double a = 2.0 * std::numbers::pi * profile.delays[i] / n_subcarriers;
    rho += profile.powers[i] * std::complex<double>{std::cos(a), std::sin(a)};
  }
  return rho;
}

std::complex<double> freq_difference(const TapProfile& profile, int n_subcarriers) {
  std::complex<double> d = 0.0;
  for (int i = 0; i < profile.tap_count(); ++i) {
    const double a = 2.0 * std::numbers::pi * profile.delays[i] / n_subcarriers;
    d += profile.powers[i] * (1.0 - std::complex<double>{std::cos(a), -std::sin(a)});
  }
  return d;
}

MobilityModel MobilityModel::from_speed(double speed_mps, double carrier_hz,
                                        double symbol_period_s, int oscillator_count) {
  if (speed_mps < 0.0 || carrier_hz <= 0.0 || symbol_period_s <= 0.0)
    throw std::invalid_argument("MobilityModel: bad parameters");
  if (oscillator_count < 8)
    throw std::invalid_argument("MobilityModel: need at least 8 oscillators");
  MobilityModel m;
  m.speed_mps = speed_mps;
  m.carrier_hz = carrier_hz;
  m.symbol_period_s = symbol_period_s;
  m.oscillator_count = oscillator_count;
  m.doppler_hz = speed_mps / 3.0e8 * carrier_hz;
  return m;
}

MobilityModel MobilityModel::stationary(double symbol_period_s) {
  MobilityModel m;
  m.symbol_period_s = symbol_period_s;
  return m;
}

double time_correlation(const MobilityModel& model) {
  return bessel_j0(2.0 * std::numbers::pi * model.doppler_hz * model.symbol_period_s);
}

std::vector<ChannelRealization> evolve(const ChannelRealization& realization,
                                       const MobilityModel& model, int steps,
                                       RngStream& rng) {
  if (steps < 1) throw std::invalid_argument("evolve: steps must be >= 1");
  const int n = static_cast<int>(realization.cfr.size());

  std::vector<ChannelRealization> out;
  out.reserve(static_cast<std::size_t>(steps));

  if (model.doppler_hz * model.symbol_period_s == 0.0) {
    for (int s = 0; s < steps; ++s) {
      out.push_back(realization);
      out.back().block_index = realization.block_index + s;
    }
    return out;
  }

  // Sum-of-sinusoids Jakes generator (Zheng-Xiao form): per tap,
  //   gI(t) = sqrt(2/No) sum cos(wd t cos(a_k) + phi_k)
  //   gQ(t) = sqrt(2/No) sum cos(wd t sin(a_k) + psi_k)
  //   a_k = (2 pi k - pi + theta) / (4 No)
  // which reproduces the J0 autocorrelation for No >= 8.
  const int no = model.oscillator_count;
  const double wd = 2.0 * std::numbers::pi * model.doppler_hz;
  const int ntap = static_cast<int>(realization.delays.size());
  const double pi = std::numbers::pi;

  struct TapOsc {
    std::vector<double> cos_a, sin_a, phi, psi;
  };
  std::vector<TapOsc> osc(static_cast<std::size_t>(ntap));
  for (auto& o : osc) {
    const double theta = (2.0 * rng.next_double() - 1.0) * pi;
    o.cos_a.resize(static_cast<std::size_t>(no));
    o.sin_a.resize(static_cast<std::size_t>(no));
    o.phi.resize(static_cast<std::size_t>(no));
    o.psi.resize(static_cast<std::size_t>(no));
    for (int k = 0; k < no; ++k) {
      const double a = (2.0 * pi * (k + 1) - pi + theta) / (4.0 * no);
      o.cos_a[static_cast<std::size_t>(k)] = std::cos(a);
      o.sin_a[static_cast<std::size_t>(k)] = std::sin(a);
      o.phi[static_cast<std::size_t>(k)] = (2.0 * rng.next_double() - 1.0) * pi;
      o.psi[static_cast<std::size_t>(k)] = (2.0 * rng.next_double() - 1.0) * pi;
    }
  }

  const double amp = 1.0 / std::sqrt(static_cast<double>(no));
  for (int s = 0; s < steps; ++s) {
    const double t = s * model.symbol_period_s;
    ChannelRealization cr;
    cr.delays = realization.delays;
    cr.powers = realization.powers;
    cr.block_index = realization.block_index + s;
    cr.taps.resize(ntap);
    for (int m = 0; m < ntap; ++m) {
      const auto& o = osc[static_cast<std::size_t>(m)];
      double gi = 0.0, gq = 0.0;
      for (int k = 0; k < no; ++k) {
        gi += std::cos(wd * t * o.cos_a[static_cast<std::size_t>(k)] +
                       o.phi[static_cast<std::size_t>(k)]);
        gq += std::cos(wd * t * o.sin_a[static_cast<std::size_t>(k)] +
                       o.psi[static_cast<std::size_t>(k)]);
      }
      const double scale = amp * std::sqrt(realization.powers[m]);
      cr.taps[m] = {scale * gi, scale * gq};
    }
    cr.cfr = cfr_from_taps(cr.delays, cr.taps, n);
    out.push_back(std::move(cr));
  }
  return out;
}

}  // namespace d3ofdm
