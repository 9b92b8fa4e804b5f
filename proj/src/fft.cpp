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

#include "d3ofdm/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace d3ofdm {

bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

// Twiddle tables per length, built once. Guarded by thread_local caching so
// concurrent Monte Carlo workers never share mutable state.
const std::vector<std::complex<double>>& twiddles(Eigen::Index n) {
  thread_local std::unordered_map<Eigen::Index, std::vector<std::complex<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n / 2));
  for (Eigen::Index k = 0; k < n / 2; ++k) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
  }
  return cache.emplace(n, std::move(w)).first->second;
}

}  // namespace

void fft_inplace(Eigen::ArrayXcd& x, bool inverse) {
  const Eigen::Index n = x.size();
  if (n < 2 || !is_pow2(n))
    throw std::invalid_argument("fft: length must be a power of two, >= 2");

  // Bit-reversal permutation.
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const auto& w = twiddles(n);
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const Eigen::Index stride = n / len;
    for (Eigen::Index i = 0; i < n; i += len) {
      for (Eigen::Index k = 0; k < len / 2; ++k) {
        std::complex<double> tw = w[static_cast<std::size_t>(k * stride)];
        if (inverse) tw = std::conj(tw);
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * tw;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
      }
    }
  }

  x *= 1.0 / std::sqrt(static_cast<double>(n));
}

Eigen::ArrayXcd fft(const Eigen::ArrayXcd& x, bool inverse) {
  Eigen::ArrayXcd y = x;
  fft_inplace(y, inverse);
  return y;
}

}  // namespace d3ofdm
