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

#include "d3ofdm/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace d3ofdm {

namespace {

// Gray-coded amplitude ladders per axis; index is the bit pattern of that axis.
double gray_level_2(int b) { return b ? -1.0 : 1.0; }

double gray_level_4(int bits) {
  // 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
  switch (bits) {
    case 0b00: return -3.0;
    case 0b01: return -1.0;
    case 0b11: return +1.0;
    default:   return +3.0;
  }
}

double gray_level_8(int bits) {
  switch (bits) {
    case 0b000: return -7.0;
    case 0b001: return -5.0;
    case 0b011: return -3.0;
    case 0b010: return -1.0;
    case 0b110: return +1.0;
    case 0b111: return +3.0;
    case 0b101: return +5.0;
    default:    return +7.0;  // 0b100
  }
}

std::vector<std::complex<double>> square_qam(int bits_per_axis, double norm) {
  const int m = 1 << (2 * bits_per_axis);
  std::vector<std::complex<double>> pts(static_cast<std::size_t>(m));
  for (int idx = 0; idx < m; ++idx) {
    const int ibits = idx >> bits_per_axis;
    const int qbits = idx & ((1 << bits_per_axis) - 1);
    const double li = bits_per_axis == 2 ? gray_level_4(ibits) : gray_level_8(ibits);
    const double lq = bits_per_axis == 2 ? gray_level_4(qbits) : gray_level_8(qbits);
    pts[static_cast<std::size_t>(idx)] = std::complex<double>{li, lq} / norm;
  }
  return pts;
}

}  // namespace

Constellation::Constellation(std::string name, std::vector<std::complex<double>> pts, bool cm)
    : name_(std::move(name)), points_(std::move(pts)), constant_modulus_(cm) {
  int b = 0;
  while ((1 << b) < static_cast<int>(points_.size())) ++b;
  bits_per_symbol_ = b;
}

const Constellation& Constellation::bpsk() {
  static const Constellation c("bpsk", {{1.0, 0.0}, {-1.0, 0.0}}, true);
  return c;
}

const Constellation& Constellation::qpsk() {
  // index bits (b0 b1): I sign from b0, Q sign from b1.
  const double s = 1.0 / std::sqrt(2.0);
  static const Constellation c("qpsk",
                               {{s, s}, {s, -s}, {-s, s}, {-s, -s}}, true);
  return c;
}

const Constellation& Constellation::qam16() {
  static const Constellation c("16qam", square_qam(2, std::sqrt(10.0)), false);
  return c;
}

const Constellation& Constellation::qam64() {
  static const Constellation c("64qam", square_qam(3, std::sqrt(42.0)), false);
  return c;
}

const Constellation& Constellation::by_name(std::string_view name) {
  if (name == "bpsk") return bpsk();
  if (name == "qpsk") return qpsk();
  if (name == "16qam" || name == "qam16") return qam16();
  if (name == "64qam" || name == "qam64") return qam64();
  throw std::invalid_argument("Constellation::by_name: unknown '" + std::string(name) + "'");
}

int Constellation::nearest(std::complex<double> z) const {
  int best = 0;
  double best_d2 = std::norm(z - points_[0]);
  for (int i = 1; i < size(); ++i) {
    const double d2 = std::norm(z - points_[static_cast<std::size_t>(i)]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

void Constellation::bits_of(int index, std::vector<std::uint8_t>& out) const {
  for (int b = bits_per_symbol_ - 1; b >= 0; --b)
    out.push_back(static_cast<std::uint8_t>((index >> b) & 1));
}

int Constellation::index_of_bits(const std::uint8_t* bits) const {
  int idx = 0;
  for (int b = 0; b < bits_per_symbol_; ++b) idx = (idx << 1) | (bits[b] & 1);
  return idx;
}

Eigen::ArrayXcd map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c) {
  const int bps = c.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw std::invalid_argument("map_bits: bit count not divisible by bits/symbol");
  const Eigen::Index n = static_cast<Eigen::Index>(bits.size()) / bps;
  Eigen::ArrayXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = c.point(c.index_of_bits(bits.data() + i * bps));
  return out;
}

std::vector<std::uint8_t> demap_bits(const Eigen::ArrayXcd& symbols, const Constellation& c) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(symbols.size() * c.bits_per_symbol()));
  for (Eigen::Index i = 0; i < symbols.size(); ++i) c.bits_of(c.nearest(symbols[i]), bits);
  return bits;
}

}  // namespace d3ofdm
