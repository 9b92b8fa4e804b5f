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

#include "d3ofdm/layout.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "d3ofdm/fft.hpp"

namespace d3ofdm {

void OfdmParams::validate() const {
  if (!is_pow2(n)) throw std::invalid_argument("OfdmParams: n must be a power of two");
  if (n_cp < 0 || n_cp >= n) throw std::invalid_argument("OfdmParams: n_cp out of range");
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("OfdmParams: bad sample rate");
}

SegmentLayout::SegmentLayout(Mode m, int k_, std::complex<double> pilot)
    : mode(m), k(k_), pilot_value(pilot) {
  if (mode == Mode::SS && k < 2) throw std::invalid_argument("SegmentLayout: SS needs k >= 2");
  if (mode == Mode::DS && k < 3) throw std::invalid_argument("SegmentLayout: DS needs k >= 3");
  if (pilot_value == std::complex<double>{0.0, 0.0})
    throw std::invalid_argument("SegmentLayout: pilot value must be nonzero");
}

std::vector<int> SegmentLayout::pilot_positions() const {
  return mode == Mode::SS ? std::vector<int>{0} : std::vector<int>{0, k - 1};
}

bool SegmentLayout::is_pilot(int pos) const {
  return pos == 0 || (mode == Mode::DS && pos == k - 1);
}

Eigen::ArrayXcd build_segment(const Eigen::ArrayXcd& data, const SegmentLayout& layout) {
  if (data.size() != layout.data_count())
    throw std::invalid_argument("build_segment: data length mismatch");
  Eigen::ArrayXcd seg(layout.k);
  Eigen::Index di = 0;
  for (int p = 0; p < layout.k; ++p)
    seg[p] = layout.is_pilot(p) ? layout.pilot_value : data[di++];
  return seg;
}

Eigen::ArrayXcd extract_segment_data(const Eigen::ArrayXcd& segment,
                                     const SegmentLayout& layout) {
  if (segment.size() != layout.k)
    throw std::invalid_argument("extract_segment_data: segment length mismatch");
  Eigen::ArrayXcd data(layout.data_count());
  Eigen::Index di = 0;
  for (int p = 0; p < layout.k; ++p)
    if (!layout.is_pilot(p)) data[di++] = segment[p];
  return data;
}

FrameLayout FrameLayout::tile(int n, const SegmentLayout& layout) {
  if (n < layout.k) throw std::invalid_argument("FrameLayout: frame shorter than one segment");
  FrameLayout f;
  f.base = layout;
  std::set<int> pilot_set;

  if (layout.mode == SegmentLayout::Mode::SS) {
    int begin = 0;
    while (begin < n) {
      int end = begin + layout.k;
      if (n - end < layout.k) end = n;  // fold remainder into the last segment
      f.segments.emplace_back(begin, end);
      pilot_set.insert(begin);
      begin = end;
    }
  } else {
    const int stride = layout.k - 1;
    int begin = 0;
    while (begin < n - 1) {
      int end = begin + stride;                 // inclusive far pilot index
      if (n - 1 - end < stride) end = n - 1;    // extend final segment to the edge
      f.segments.emplace_back(begin, end + 1);
      pilot_set.insert(begin);
      pilot_set.insert(end);
      begin = end;
    }
  }

  f.pilots.assign(pilot_set.begin(), pilot_set.end());
  for (int v = 0; v < n; ++v)
    if (!pilot_set.count(v)) f.data_cells.push_back(v);
  return f;
}

bool FrameLayout::is_pilot(int pos) const {
  return std::binary_search(pilots.begin(), pilots.end(), pos);
}

Eigen::ArrayXcd build_frame(const Eigen::ArrayXcd& data, const FrameLayout& frame) {
  if (data.size() != frame.data_count())
    throw std::invalid_argument("build_frame: data length mismatch");
  const int n = static_cast<int>(frame.pilots.size() + frame.data_cells.size());
  Eigen::ArrayXcd sym(n);
  for (int p : frame.pilots) sym[p] = frame.base.pilot_value;
  for (Eigen::Index i = 0; i < data.size(); ++i) sym[frame.data_cells[static_cast<std::size_t>(i)]] = data[i];
  return sym;
}

Eigen::ArrayXcd extract_frame_data(const Eigen::ArrayXcd& symbol, const FrameLayout& frame) {
  Eigen::ArrayXcd data(frame.data_count());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    data[i] = symbol[frame.data_cells[static_cast<std::size_t>(i)]];
  return data;
}

RbLayout RbLayout::lte_default() {
  return with_cells({{0, 0}, {0, 6}, {4, 3}, {4, 9}, {7, 0}, {7, 6}, {11, 3}, {11, 9}});
}

RbLayout RbLayout::with_cells(std::vector<std::pair<int, int>> cells) {
  RbLayout rb;
  rb.pilot_cells = std::move(cells);
  rb.validate();
  return rb;
}

std::vector<int> RbLayout::pilot_rows() const {
  std::set<int> rset;
  for (const auto& [r, c] : pilot_cells) rset.insert(r);
  return {rset.begin(), rset.end()};
}

bool RbLayout::is_pilot(int row, int col) const {
  for (const auto& [r, c] : pilot_cells)
    if (r == row && c == col) return true;
  return false;
}

void RbLayout::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("RbLayout: bad grid size");
  if (pilot_cells.empty()) throw std::invalid_argument("RbLayout: needs at least one pilot");
  std::set<std::pair<int, int>> seen;
  for (const auto& [r, c] : pilot_cells) {
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::invalid_argument("RbLayout: pilot cell out of range");
    if (!seen.insert({r, c}).second)
      throw std::invalid_argument("RbLayout: duplicate pilot cell");
  }
  // Two-step detection needs every column anchorable: pilot rows span all
  // columns after step one, so one pilot row suffices; enforced implicitly.
}

Eigen::ArrayXXcd build_rb(const Eigen::ArrayXcd& data, const RbLayout& layout) {
  if (data.size() != layout.data_count())
    throw std::invalid_argument("build_rb: data length mismatch");
  Eigen::ArrayXXcd grid(layout.rows, layout.cols);
  Eigen::Index di = 0;
  for (int r = 0; r < layout.rows; ++r)
    for (int c = 0; c < layout.cols; ++c)
      grid(r, c) = layout.is_pilot(r, c) ? layout.pilot_value : data[di++];
  return grid;
}

Eigen::ArrayXcd extract_rb_data(const Eigen::ArrayXXcd& grid, const RbLayout& layout) {
  Eigen::ArrayXcd data(layout.data_count());
  Eigen::Index di = 0;
  for (int r = 0; r < layout.rows; ++r)
    for (int c = 0; c < layout.cols; ++c)
      if (!layout.is_pilot(r, c)) data[di++] = grid(r, c);
  return data;
}

}  // namespace d3ofdm
