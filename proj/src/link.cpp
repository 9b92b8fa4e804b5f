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

#include "d3ofdm/link.hpp"

#include <cmath>
#include <stdexcept>

#include "d3ofdm/fft.hpp"

namespace d3ofdm {

double noise_var_for_snr_db(double snr_db) {
  return 1.0 / (2.0 * std::pow(10.0, snr_db / 10.0));
}

Eigen::ArrayXcd transmit(const Eigen::ArrayXcd& d, const OfdmParams& params) {
  params.validate();
  if (d.size() != params.n) throw std::invalid_argument("transmit: |d| != n");
  Eigen::ArrayXcd body = fft(d, /*inverse=*/true);
  Eigen::ArrayXcd out(params.n_total());
  out.head(params.n_cp) = body.tail(params.n_cp);
  out.tail(params.n) = body;
  return out;
}

Eigen::ArrayXcd propagate(const Eigen::ArrayXcd& x, const ChannelRealization& channel,
                          const OfdmParams& params, double sigma_w_sq, RngStream& rng) {
  if (x.size() != params.n_total()) throw std::invalid_argument("propagate: |x| != n + n_cp");
  if (!channel.delays.empty() && channel.delays.back() > params.n_cp)
    throw std::invalid_argument("propagate: channel delay spread exceeds the cyclic prefix");
  if (sigma_w_sq < 0.0) throw std::invalid_argument("propagate: negative noise variance");

  Eigen::ArrayXcd y = Eigen::ArrayXcd::Zero(x.size());
  for (std::size_t i = 0; i < channel.delays.size(); ++i) {
    const int m = channel.delays[i];
    const std::complex<double> h = channel.taps[static_cast<Eigen::Index>(i)];
    y.tail(x.size() - m) += h * x.head(x.size() - m);
  }
  if (sigma_w_sq > 0.0)
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += rng.next_cgauss(2.0 * sigma_w_sq);
  return y;
}

Eigen::ArrayXcd receive(const Eigen::ArrayXcd& y, const OfdmParams& params) {
  if (y.size() != params.n_total()) throw std::invalid_argument("receive: |y| != n + n_cp");
  Eigen::ArrayXcd body = y.tail(params.n);
  fft_inplace(body, /*inverse=*/false);
  return body;
}

Eigen::ArrayXcd apply_channel_freq(const Eigen::ArrayXcd& d, const Eigen::ArrayXcd& cfr,
                                   double sigma_w_sq, RngStream& rng) {
  if (d.size() != cfr.size()) throw std::invalid_argument("apply_channel_freq: length mismatch");
  if (sigma_w_sq < 0.0) throw std::invalid_argument("apply_channel_freq: negative noise variance");
  Eigen::ArrayXcd r = cfr * d;
  if (sigma_w_sq > 0.0)
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] += rng.next_cgauss(2.0 * sigma_w_sq);
  return r;
}

}  // namespace d3ofdm
