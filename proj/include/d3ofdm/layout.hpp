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

#ifndef D3OFDM_LAYOUT_HPP
#define D3OFDM_LAYOUT_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace d3ofdm {

/// OFDM numerology. Defaults follow a 512-subcarrier LTE-like grid.
struct OfdmParams {
  int n = 512;
  int n_cp = 64;
  double sample_rate_hz = 7.68e6;
  double subcarrier_spacing_hz = 15e3;

  int n_total() const { return n + n_cp; }
  double symbol_period_s() const { return n_total() / sample_rate_hz; }

  void validate() const;  // n power of two, n_cp in [0, n)
};

/// A run of k subcarriers with a pilot on one end (SS) or both ends (DS).
struct SegmentLayout {
  enum class Mode { SS, DS };

  Mode mode = Mode::SS;
  int k = 2;
  std::complex<double> pilot_value{1.0, 0.0};

  SegmentLayout() = default;
  SegmentLayout(Mode m, int k_, std::complex<double> pilot = {1.0, 0.0});

  int data_count() const { return mode == Mode::SS ? k - 1 : k - 2; }
  std::vector<int> pilot_positions() const;
  bool is_pilot(int pos) const;
};

/// Assemble one segment: pilots at the layout positions, data filling the
/// remaining cells in order. Data length must equal data_count().
Eigen::ArrayXcd build_segment(const Eigen::ArrayXcd& data, const SegmentLayout& layout);

/// Pull the data cells back out, in the same order build_segment fills them.
Eigen::ArrayXcd extract_segment_data(const Eigen::ArrayXcd& segment, const SegmentLayout& layout);

/// Tiling of an N-subcarrier symbol into pilot-anchored segments. SS segments
/// of stride k; DS segments share their boundary pilots (stride k-1). Any
/// remainder subcarriers extend the final segment so every cell is covered.
struct FrameLayout {
  std::vector<std::pair<int, int>> segments;  // [begin, end) spans
  std::vector<int> pilots;                    // absolute pilot positions, ascending
  std::vector<int> data_cells;                // absolute data positions, ascending
  SegmentLayout base;

  static FrameLayout tile(int n, const SegmentLayout& layout);

  int pilot_count() const { return static_cast<int>(pilots.size()); }
  int data_count() const { return static_cast<int>(data_cells.size()); }
  bool is_pilot(int pos) const;
};

/// Build a full frequency-domain symbol: pilots at frame pilot positions,
/// data (length = frame data_count) in ascending subcarrier order.
Eigen::ArrayXcd build_frame(const Eigen::ArrayXcd& data, const FrameLayout& frame);
Eigen::ArrayXcd extract_frame_data(const Eigen::ArrayXcd& symbol, const FrameLayout& frame);

/// 12x14 resource-block grid (rows = subcarriers, cols = OFDM symbols) with
/// eight pilot cells. Cells here are 0-indexed; the conventional description
/// of the grid (pilot rows 1/5/8/12, pilot columns 1/4/7/10) is 1-indexed.
struct RbLayout {
  int rows = 12;
  int cols = 14;
  std::vector<std::pair<int, int>> pilot_cells;  // (row, col), 0-indexed
  std::complex<double> pilot_value{1.0, 0.0};

  /// Staggered default: rows {0,7} carry pilots at columns {0,6},
  /// rows {4,11} at columns {3,9} — two pilots in every pilot row.
  static RbLayout lte_default();
  static RbLayout with_cells(std::vector<std::pair<int, int>> cells_zero_indexed);

  std::vector<int> pilot_rows() const;  // sorted distinct rows carrying pilots
  bool is_pilot(int row, int col) const;
  int data_count() const { return rows * cols - static_cast<int>(pilot_cells.size()); }

  void validate() const;
};

/// Fill a rows x cols grid: pilots at pilot cells, data in row-major order
/// (row = frequency index is the outer dimension).
Eigen::ArrayXXcd build_rb(const Eigen::ArrayXcd& data, const RbLayout& layout);
Eigen::ArrayXcd extract_rb_data(const Eigen::ArrayXXcd& grid, const RbLayout& layout);

}  // namespace d3ofdm

#endif
