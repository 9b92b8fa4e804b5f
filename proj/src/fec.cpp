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

#include "d3ofdm/fec.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace d3ofdm {

namespace {

constexpr int kTail = ConvCode::kConstraintLength - 1;

// Register layout: bit 6 = newest input, bit 0 = oldest, so the MSB-first
// generator taps line up with [newest .. oldest].
inline unsigned reg_of(unsigned state, unsigned input) {
  return (input << kTail) | state;
}

inline std::uint8_t out_bit(unsigned reg, unsigned gen) {
  return static_cast<std::uint8_t>(std::popcount(reg & gen) & 1);
}

inline unsigned next_state(unsigned state, unsigned input) {
  return (reg_of(state, input) >> 1) & (ConvCode::kStates - 1);
}

}  // namespace

std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint8_t> out;
  out.reserve(2 * (bits.size() + kTail));
  unsigned state = 0;
  auto push = [&](unsigned input) {
    const unsigned reg = reg_of(state, input);
    out.push_back(out_bit(reg, ConvCode::kG1));
    out.push_back(out_bit(reg, ConvCode::kG2));
    state = next_state(state, input);
  };
  for (std::uint8_t b : bits) push(b & 1);
  for (int i = 0; i < kTail; ++i) push(0);
  return out;
}

std::vector<std::uint8_t> viterbi_decode_hard(const std::vector<std::uint8_t>& coded) {
  if (coded.size() % 2 != 0)
    throw std::invalid_argument("viterbi_decode_hard: coded length must be even");
  const int steps = static_cast<int>(coded.size() / 2);
  if (steps < kTail) throw std::invalid_argument("viterbi_decode_hard: stream too short");
  const int info = steps - kTail;

  constexpr int kS = ConvCode::kStates;
  constexpr int kInf = std::numeric_limits<int>::max() / 2;

  std::vector<int> pm(kS, kInf);
  pm[0] = 0;
  std::vector<std::uint8_t> decisions(static_cast<std::size_t>(steps) * kS);

  std::vector<int> npm(kS);
  for (int t = 0; t < steps; ++t) {
    const int r0 = coded[static_cast<std::size_t>(2 * t)] & 1;
    const int r1 = coded[static_cast<std::size_t>(2 * t + 1)] & 1;
    std::fill(npm.begin(), npm.end(), kInf);
    std::uint8_t* dec = &decisions[static_cast<std::size_t>(t) * kS];
    const int max_input = t < info ? 1 : 0;  // forced zero tail
    for (int s = 0; s < kS; ++s) {
      if (pm[s] >= kInf) continue;
      for (int u = 0; u <= max_input; ++u) {
        const unsigned reg = reg_of(static_cast<unsigned>(s), static_cast<unsigned>(u));
        const int cost = (out_bit(reg, ConvCode::kG1) != r0) + (out_bit(reg, ConvCode::kG2) != r1);
        const int ns = static_cast<int>(next_state(static_cast<unsigned>(s), static_cast<unsigned>(u)));
        const int m = pm[s] + cost;
        if (m < npm[ns]) {
          npm[ns] = m;
          dec[ns] = static_cast<std::uint8_t>((u << 6) | s);  // input bit + predecessor
        }
      }
    }
    pm.swap(npm);
  }

  // Zero termination: the path ends in state 0.
  std::vector<std::uint8_t> out(static_cast<std::size_t>(info));
  int state = 0;
  for (int t = steps - 1; t >= 0; --t) {
    const std::uint8_t d = decisions[static_cast<std::size_t>(t) * kS + state];
    const int input = (d >> 6) & 1;
    state = d & (ConvCode::kStates - 1);
    if (t < info) out[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(input);
  }
  return out;
}

std::vector<std::uint8_t> BlockInterleaver::interleave(const std::vector<std::uint8_t>& bits) {
  const std::size_t blocks = (bits.size() + kBlock - 1) / kBlock;
  std::vector<std::uint8_t> out(std::max<std::size_t>(blocks, 1) * kBlock, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const std::size_t blk = i / kBlock;
    const std::size_t off = i % kBlock;
    const std::size_t perm = (off % kRows) * kCols + off / kRows;
    out[blk * kBlock + perm] = bits[i];
  }
  return out;
}

std::vector<std::uint8_t> BlockInterleaver::deinterleave(const std::vector<std::uint8_t>& bits,
                                                         std::size_t original_size) {
  if (bits.size() % kBlock != 0)
    throw std::invalid_argument("deinterleave: length must be a whole number of blocks");
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const std::size_t blk = i / kBlock;
    const std::size_t off = i % kBlock;
    const std::size_t perm = (off % kRows) * kCols + off / kRows;
    out[blk * kBlock + off] = bits[blk * kBlock + perm];
  }
  out.resize(std::min(original_size, out.size()));
  return out;
}

}  // namespace d3ofdm
