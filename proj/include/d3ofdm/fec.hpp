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

#ifndef D3OFDM_FEC_HPP
#define D3OFDM_FEC_HPP

#include <cstdint>
#include <vector>

namespace d3ofdm {

/// Rate-1/2 feed-forward convolutional code with octal generators (171, 131),
/// constraint length 7 (64 decoder states). Generator taps apply newest bit
/// first: output_j(t) = sum_i g_j[i] u[t - i] with g taken MSB-first.
struct ConvCode {
  static constexpr int kConstraintLength = 7;
  static constexpr unsigned kG1 = 0171;
  static constexpr unsigned kG2 = 0131;
  static constexpr int kStates = 1 << (kConstraintLength - 1);
};

/// Encode with kConstraintLength-1 zero tail bits appended internally;
/// output length is 2 * (input + 6).
std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& bits);

/// Hard-decision maximum-likelihood decoding (Hamming metric) of a
/// zero-terminated stream; inverse of conv_encode on error-free input.
/// Rejects odd-length input.
std::vector<std::uint8_t> viterbi_decode_hard(const std::vector<std::uint8_t>& coded);

/// 512 x 512 block interleaver: write row-wise, read column-wise, so index
/// i maps to (i mod 512) * 512 + floor(i / 512) within each block. Input is
/// zero-padded up to a whole block; deinterleave undoes the permutation and
/// truncates back to original_size.
struct BlockInterleaver {
  static constexpr int kRows = 512;
  static constexpr int kCols = 512;
  static constexpr std::size_t kBlock = static_cast<std::size_t>(kRows) * kCols;

  static std::vector<std::uint8_t> interleave(const std::vector<std::uint8_t>& bits);
  static std::vector<std::uint8_t> deinterleave(const std::vector<std::uint8_t>& bits,
                                                std::size_t original_size);
};

}  // namespace d3ofdm

#endif
