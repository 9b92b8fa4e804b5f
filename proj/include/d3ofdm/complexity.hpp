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

#ifndef D3OFDM_COMPLEXITY_HPP
#define D3OFDM_COMPLEXITY_HPP

namespace d3ofdm {

/// Primitive real-operation counts per detected OFDM symbol.
struct OpCounts {
  long long r_a = 0;  // real additions
  long long r_m = 0;  // real multiplications
  long long r_d = 0;  // real divisions
};

enum class Modulus { CM, QAM };
enum class Decision { Soft, Hard };

/// Conventional pilot-aided receiver (LS estimation, linear interpolation,
/// single-tap zero-forcing, minimum-distance detection). M follows the
/// published formulas' own convention and is passed through verbatim.
OpCounts conventional_ops(long long n, long long n_p, long long m, Modulus modulus);

/// Direct data detector (Viterbi implementation). CM constellations need no
/// divisions; QAM uses the general quotient branch metric.
OpCounts d3_ops(long long n, long long n_p, long long m, Modulus modulus);

/// Rate-1/2 convolutional decoder cost per OFDM symbol of N coded bits.
/// Soft: N 2^K additions and multiplications. Hard: path-metric additions
/// plus XOR branch metrics charged at one eighth of an addition,
/// N (2^K + 2^{K-2}) additions total.
OpCounts coded_va_ops(long long n, int constraint_k, Decision decision);

/// Loop-structured counting replays of the two receivers: iterate the actual
/// per-subcarrier / per-trellis-step structure and tally the per-step
/// primitive costs. These must reproduce the closed formulas exactly; any
/// mismatch is a transcription bug in one of the two.
///
/// Reconciliations baked into the cost model (the published step accounts do
/// not sum to the published totals as printed):
///  - pilot LS estimation charges one complex multiplication = 3 additions
///    (not 4) so the conventional totals close;
///  - the trellis walker charges 3*2^M branch-metric additions plus 2*2^M
///    add-compare-select additions per full step, closing the 5*2^M total.
OpCounts conventional_ops_walked(long long n, long long n_p, long long m);
OpCounts d3_ops_walked(long long n, long long n_p, long long m);

/// Energy weights per primitive operation. Artifact defaults, not published
/// values; the relative-power figure depends on them.
struct PowerWeights {
  double w_add = 1.0;
  double w_mul = 3.0;
  double w_div = 24.0;
};

double weighted_cost(const OpCounts& c, const PowerWeights& w);

/// eta_P = weighted(a) / weighted(b); rejects a zero denominator.
double relative_power(const OpCounts& a, const OpCounts& b, const PowerWeights& w);

}  // namespace d3ofdm

#endif
