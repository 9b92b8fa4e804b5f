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

#ifndef D3OFDM_LINK_HPP
#define D3OFDM_LINK_HPP

#include <Eigen/Dense>

#include "d3ofdm/channel.hpp"
#include "d3ofdm/layout.hpp"
#include "d3ofdm/rng.hpp"

namespace d3ofdm {

// Noise convention used across the library: sigma_w_sq is the per-component
// variance, so E[|w|^2] = 2 sigma_w_sq, and the average SNR of unit-power
// symbols over a normalized channel is 1 / (2 sigma_w_sq).

/// dB average SNR -> per-component noise variance.
double noise_var_for_snr_db(double snr_db);

/// Unitary IFFT plus cyclic prefix; length n -> n + n_cp.
Eigen::ArrayXcd transmit(const Eigen::ArrayXcd& d, const OfdmParams& params);

/// Linear convolution with the channel taps plus AWGN. The channel's maximum
/// delay must fit inside the cyclic prefix. Output keeps the input length.
Eigen::ArrayXcd propagate(const Eigen::ArrayXcd& x, const ChannelRealization& channel,
                          const OfdmParams& params, double sigma_w_sq, RngStream& rng);

/// Drop the cyclic prefix and apply the unitary FFT: the composite
/// transmit -> propagate -> receive chain realizes r_v = H_v d_v + w_v.
Eigen::ArrayXcd receive(const Eigen::ArrayXcd& y, const OfdmParams& params);

/// Frequency-domain shortcut r_v = H_v d_v + w_v.
Eigen::ArrayXcd apply_channel_freq(const Eigen::ArrayXcd& d, const Eigen::ArrayXcd& cfr,
                                   double sigma_w_sq, RngStream& rng);

}  // namespace d3ofdm

#endif
