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

#ifndef D3OFDM_CHANNEL_HPP
#define D3OFDM_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <string_view>
#include <vector>

#include "d3ofdm/rng.hpp"

namespace d3ofdm {

/// Multipath power-delay profile on the sample grid. Delays are integer
/// sample offsets, strictly increasing; average tap powers are normalized to
/// sum to one so a unit-power constellation sees unit average channel gain.
struct TapProfile {
  std::vector<int> delays;
  Eigen::ArrayXd powers;

  static TapProfile custom(std::vector<int> delays, std::vector<double> powers);

  /// Built-ins: "flat" (single tap), "tux6" (severe urban, delays
  /// {0,2,3,9,13,29}), "tux9" (moderate urban, delays 0..8).
  static TapProfile named(std::string_view name);

  int max_delay() const { return delays.empty() ? 0 : delays.back(); }
  int tap_count() const { return static_cast<int>(delays.size()); }
};

/// One quasi-static channel draw: time-domain taps plus the derived
/// frequency response H_v = sum_m h_m exp(-j 2 pi m v / N).
struct ChannelRealization {
  std::vector<int> delays;
  Eigen::ArrayXd powers;      // carried along so the draw can be evolved
  Eigen::ArrayXcd taps;       // one complex gain per delay
  Eigen::ArrayXcd cfr;        // length-N frequency response
  long block_index = 0;
};

/// Independent complex Gaussian taps with the profile's average powers;
/// cfr is filled for n_subcarriers bins.
ChannelRealization sample_realization(const TapProfile& profile, int n_subcarriers,
                                      RngStream& rng);

/// Recompute cfr from taps (used after evolving the taps).
Eigen::ArrayXcd cfr_from_taps(const std::vector<int>& delays, const Eigen::ArrayXcd& taps,
                              int n_subcarriers);

/// Fresh tap draw evaluated only on `len` adjacent bins starting at v0
/// (modulo the grid). Equivalent to sample_realization followed by a window
/// copy, without the full-length transform.
Eigen::ArrayXcd sample_cfr_window(const TapProfile& profile, int n_subcarriers, int v0,
                                  int len, RngStream& rng);

/// Correlation coefficient between two adjacent subcarriers,
/// sum_m sigma_m^2 exp(j 2 pi m / N).
std::complex<double> freq_correlation(const TapProfile& profile, int n_subcarriers);

/// Power-weighted adjacent-subcarrier difference,
/// sum_m sigma_m^2 (1 - exp(-j 2 pi m / N)). Zero for a flat profile.
/// (The plain expectation of H_v - H_{v+1} vanishes for zero-mean taps;
/// this is the profile-level measure of selectivity severity.)
std::complex<double> freq_difference(const TapProfile& profile, int n_subcarriers);

/// Terminal mobility description. doppler_hz = (speed / c) * carrier with
/// c = 3e8 m/s. The correlation time base (inter-sample period) is exposed
/// explicitly instead of being inferred.
struct MobilityModel {
  double doppler_hz = 0.0;
  double symbol_period_s = 75e-6;
  int oscillator_count = 16;  // sum-of-sinusoids order, >= 8
  double carrier_hz = 1.9e9;
  double speed_mps = 0.0;

  static MobilityModel from_speed(double speed_mps, double carrier_hz,
                                  double symbol_period_s, int oscillator_count = 16);
  static MobilityModel stationary(double symbol_period_s = 75e-6);
};

/// Lag-one temporal correlation J0(2 pi f_d T).
double time_correlation(const MobilityModel& model);

/// Evolve a realization over `steps` OFDM symbols under the Jakes Doppler
/// spectrum (sum-of-sinusoids generator). Taps stay constant within a symbol;
/// the lag-k autocorrelation across symbols tracks J0(2 pi f_d T k) and the
/// marginal tap powers are preserved. With zero Doppler the input realization
/// is replicated unchanged; otherwise the sequence is a fresh stationary
/// realization of the same profile driven by `rng`.
std::vector<ChannelRealization> evolve(const ChannelRealization& realization,
                                       const MobilityModel& model, int steps,
                                       RngStream& rng);

}  // namespace d3ofdm

#endif
