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

#ifndef D3OFDM_RNG_HPP
#define D3OFDM_RNG_HPP

#include <complex>
#include <cstdint>

namespace d3ofdm {

/// Counter-seeded xoshiro256++ stream with its own Box-Muller Gaussian source.
///
/// The same (seed, stream_id) pair always produces the same sample sequence,
/// independent of platform and of the standard library (std distributions are
/// implementation-defined and would break byte-identical reruns). Distinct
/// stream_ids give statistically independent streams, which is what the Monte
/// Carlo harness relies on to stay deterministic under any worker count.
/// A single stream must not be shared across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double next_double();

  /// Uniform in (0, 1], safe as a log() argument.
  double next_double_open();

  /// Standard normal variate (Box-Muller, one spare cached).
  double next_gauss();

  /// Circularly-symmetric complex Gaussian with E[|z|^2] = variance_per_complex
  /// (each component carries half of it). Rejects variance <= 0.
  std::complex<double> next_cgauss(double variance_per_complex);

  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace d3ofdm

#endif
