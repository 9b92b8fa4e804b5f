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

#ifndef D3OFDM_CONSTELLATION_HPP
#define D3OFDM_CONSTELLATION_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace d3ofdm {

/// Gray-mapped unit-average-power constellation (BPSK/QPSK/16QAM/64QAM).
///
/// The point index IS the Gray bit pattern (MSB first), so index 0 always
/// maps to the all-zero bit word. For BPSK bit 0 -> +1. Deterministic
/// tie-breaking conventions throughout the detectors refer to this index
/// order.
class Constellation {
 public:
  static const Constellation& bpsk();
  static const Constellation& qpsk();
  static const Constellation& qam16();
  static const Constellation& qam64();
  static const Constellation& by_name(std::string_view name);  // "bpsk"|"qpsk"|"16qam"|"64qam"

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_per_symbol_; }
  bool constant_modulus() const { return constant_modulus_; }
  std::complex<double> point(int index) const { return points_[static_cast<std::size_t>(index)]; }
  const std::vector<std::complex<double>>& points() const { return points_; }

  /// Nearest-point hard decision; exact ties resolve to the lowest index.
  int nearest(std::complex<double> z) const;

  /// Bits (MSB first) of a point index.
  void bits_of(int index, std::vector<std::uint8_t>& out) const;
  int index_of_bits(const std::uint8_t* bits) const;

 private:
  Constellation(std::string name, std::vector<std::complex<double>> pts, bool cm);

  std::string name_;
  std::vector<std::complex<double>> points_;
  int bits_per_symbol_;
  bool constant_modulus_;
};

/// Gray-map a bit vector to symbols. The bit count must divide evenly.
Eigen::ArrayXcd map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c);

/// Hard-demap symbols back to bits (nearest point).
std::vector<std::uint8_t> demap_bits(const Eigen::ArrayXcd& symbols, const Constellation& c);

}  // namespace d3ofdm

#endif
