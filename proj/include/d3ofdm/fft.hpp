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

#ifndef D3OFDM_FFT_HPP
#define D3OFDM_FFT_HPP

#include <Eigen/Dense>
#include <complex>

namespace d3ofdm {

/// Unitary radix-2 FFT. Both directions are scaled by 1/sqrt(N), so
/// fft(fft(x), inverse) == x and norms are preserved.
/// The length must be a power of two, N >= 2; anything else is rejected.
Eigen::ArrayXcd fft(const Eigen::ArrayXcd& x, bool inverse = false);

/// In-place variant used on hot paths.
void fft_inplace(Eigen::ArrayXcd& x, bool inverse = false);

bool is_pow2(Eigen::Index n);

}  // namespace d3ofdm

#endif
