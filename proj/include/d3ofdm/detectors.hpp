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

#ifndef D3OFDM_DETECTORS_HPP
#define D3OFDM_DETECTORS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "d3ofdm/constellation.hpp"
#include "d3ofdm/layout.hpp"

namespace d3ofdm {

struct DetectorOptions {
  // Exhaustive searches refuse above this many trial sequences.
  long long bruteforce_budget = 1LL << 24;
};

/// Output of a sequence detector: detected data symbols (anchors excluded,
/// ascending position order), their hard bits, and the quotient-difference
/// objective of the winning full sequence.
struct DetectionResult {
  Eigen::ArrayXcd symbols;
  std::vector<std::uint8_t> bits;
  double metric = 0.0;
};

/// Position/value pins inside a detection window (pilots, or symbols decided
/// by an earlier pass). Values need not be constellation points.
using Anchors = std::vector<std::pair<int, std::complex<double>>>;

Anchors anchors_of(const SegmentLayout& layout);

/// Sum of squared adjacent quotient differences of a trial sequence against
/// a received window (the sequence objective minimized by the direct data
/// detector). Rejects zero trial symbols.
double d3_objective(const Eigen::ArrayXcd& trial, const Eigen::ArrayXcd& r);

/// Two-dimensional window objective: adjacent-in-frequency plus
/// adjacent-in-time quotient differences over an L x K grid
/// (rows = time, columns = frequency), all adjacent pairs in both directions.
double d3_objective_2d(const Eigen::ArrayXXcd& trial, const Eigen::ArrayXXcd& received);

// ---- D3 family -----------------------------------------------------------
// All variants take one or more receive branches over the same window and
// minimize the branch-summed objective. Constant-modulus constellations use
// the correlation form of the branch metric (identical argmin, no divisions);
// QAM uses the general quotient metric. Ties resolve to the lowest
// constellation index (first differing position).

DetectionResult d3_bruteforce_anchored(const std::vector<Eigen::ArrayXcd>& branches,
                                       const Anchors& anchors, const Constellation& c,
                                       const DetectorOptions& opt = {});

DetectionResult d3_viterbi_anchored(const std::vector<Eigen::ArrayXcd>& branches,
                                    const Anchors& anchors, const Constellation& c);

DetectionResult d3_bruteforce(const Eigen::ArrayXcd& r, const SegmentLayout& layout,
                              const Constellation& c, const DetectorOptions& opt = {});

DetectionResult d3_viterbi(const Eigen::ArrayXcd& r, const SegmentLayout& layout,
                           const Constellation& c);

DetectionResult d3_simo(const std::vector<Eigen::ArrayXcd>& branches,
                        const SegmentLayout& layout, const Constellation& c,
                        const DetectorOptions& opt = {});

/// Joint detection restricted to an enumerable set of modulated sequences
/// (desk-scale codebooks). The winning sequence is returned whole.
DetectionResult d3_coded(const Eigen::ArrayXcd& r,
                         const std::vector<Eigen::ArrayXcd>& codebook,
                         const Constellation& c, const DetectorOptions& opt = {});

/// Two-step resource-block detection: pilot-bearing rows first (along time),
/// then every column (along frequency) anchored on the step-one decisions.
/// Returns the fully decided grid (pilot cells carry the pilot value).
Eigen::ArrayXXcd detect_resource_block(const Eigen::ArrayXXcd& received,
                                       const RbLayout& layout, const Constellation& c);

// ---- coherent baselines ---------------------------------------------------

struct CoherentResult {
  Eigen::ArrayXcd symbols;
  std::vector<std::uint8_t> bits;
  int degenerate_bins = 0;  // cells whose gain was exactly zero
};

/// Symbol-by-symbol minimum-distance detection with known per-cell gains;
/// multiple branches are combined as sum_b |r_b - H_b d|^2 (MRC-ML).
CoherentResult coherent_mld(const std::vector<Eigen::ArrayXcd>& branches,
                            const std::vector<Eigen::ArrayXcd>& gains,
                            const Constellation& c);

enum class InterpKind { Linear, Spline };

struct CsiEstimate {
  Eigen::ArrayXcd h_hat;
  InterpKind kind = InterpKind::Linear;
};

/// Least-squares channel estimates at pilot cells, interpolated across the
/// remaining bins (straight lines or a natural cubic spline on each of the
/// real and imaginary parts). Ends extrapolate the boundary segment.
CsiEstimate ls_estimate_interpolate(const Eigen::ArrayXcd& r,
                                    const std::vector<int>& pilot_positions,
                                    const Eigen::ArrayXcd& pilot_values, int n,
                                    InterpKind kind);

CsiEstimate ls_estimate_interpolate(const Eigen::ArrayXcd& r, const FrameLayout& frame,
                                    InterpKind kind);

struct ZfResult {
  Eigen::ArrayXcd equalized;
  std::vector<int> erasure_bins;  // zero-gain bins, decided by the tie rule
};

/// Single-tap zero-forcing equalizer r_v / H_v with per-bin erasure flagging.
ZfResult zf_equalize(const Eigen::ArrayXcd& r, const Eigen::ArrayXcd& h_hat);

/// Noncoherent sequence detection maximizing |d^H r|^2 / ||d|| over trial
/// sequences with the segment pilots pinned; branches are summed.
DetectionResult glrt_mlsd(const std::vector<Eigen::ArrayXcd>& branches,
                          const SegmentLayout& layout, const Constellation& c,
                          const DetectorOptions& opt = {});

}  // namespace d3ofdm

#endif
