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

#include "d3ofdm/complexity.hpp"

#include <stdexcept>

namespace d3ofdm {

namespace {

long long pow2(long long e) { return 1LL << e; }

void check_sizes(long long n, long long n_p, long long m) {
  if (n <= 0 || n_p < 0 || n_p >= n) throw std::invalid_argument("ops: need n > n_p >= 0");
  if (m < 1) throw std::invalid_argument("ops: m must be >= 1");
}

}  // namespace

OpCounts conventional_ops(long long n, long long n_p, long long m, Modulus modulus) {
  check_sizes(n, n_p, m);
  OpCounts c;
  if (modulus == Modulus::CM) {
    c.r_a = (13 + m) * n - (10 + m) * n_p;
    c.r_m = 2 * n * (6 + m) - 2 * n_p * (4 + m);
    c.r_d = n - n_p;
  } else {
    c.r_a = 6 * n_p + (13 + 2 * m) * (n - n_p);
    c.r_m = 8 * n_p + (12 + 4 * m) * (n - n_p);
    c.r_d = n_p + 2 * m * (n - n_p);
  }
  return c;
}

OpCounts d3_ops(long long n, long long n_p, long long m, Modulus modulus) {
  check_sizes(n, n_p, m);
  OpCounts c;
  if (modulus == Modulus::CM) {
    if (n <= 2 * n_p) throw std::invalid_argument("d3_ops: CM form needs n > 2 n_p");
    const long long full = n - 2 * n_p - 1;
    c.r_a = full * 5 * pow2(m) + 7 * m * (n_p - 1);
    c.r_m = full * (4 + pow2(m + 1)) + 2 * (n_p - 1) * (4 + 2 * m);
    c.r_d = 0;
  } else {
    c.r_a = 5 * m * n_p + 10 * m * (n - n_p);
    c.r_m = 4 * m * n_p + 8 * m * (n - n_p);
    c.r_d = 2 * m * n_p + 4 * m * (n - n_p);
  }
  return c;
}

OpCounts coded_va_ops(long long n, int constraint_k, Decision decision) {
  if (constraint_k < 3 || constraint_k > 9)
    throw std::invalid_argument("coded_va_ops: constraint length in [3, 9]");
  if (n <= 0) throw std::invalid_argument("coded_va_ops: n must be positive");
  OpCounts c;
  if (decision == Decision::Soft) {
    c.r_a = n * pow2(constraint_k);
    c.r_m = n * pow2(constraint_k);
  } else {
    c.r_a = n * (pow2(constraint_k) + pow2(constraint_k - 2));
  }
  return c;
}

OpCounts conventional_ops_walked(long long n, long long n_p, long long m) {
  check_sizes(n, n_p, m);
  OpCounts c;
  // Pilot least-squares estimates: one complex multiplication each.
  for (long long p = 0; p < n_p; ++p) {
    c.r_a += 3;
    c.r_m += 4;
  }
  for (long long v = 0; v < n - n_p; ++v) {
    // Linear interpolation: one complex multiplication, two complex additions.
    c.r_a += 3 + 2 * 2;
    c.r_m += 4;
    // Zero-forcing: one complex division = two complex mults + one real div.
    c.r_a += 2 * 3;
    c.r_m += 2 * 4;
    c.r_d += 1;
    // Minimum-distance decision over the alphabet: 2 mults + 1 add per point.
    c.r_a += m;
    c.r_m += 2 * m;
  }
  return c;
}

OpCounts d3_ops_walked(long long n, long long n_p, long long m) {
  check_sizes(n, n_p, m);
  if (n <= 2 * n_p) throw std::invalid_argument("d3_ops_walked: needs n > 2 n_p");
  OpCounts c;
  const long long branches = pow2(m);
  // Full trellis steps between non-adjacent pilots.
  for (long long s = 0; s < n - 2 * n_p - 1; ++s) {
    c.r_a += 3 * branches;      // branch metrics
    c.r_m += 4 + 2 * branches;  // two shared bracket products + per-branch
    c.r_a += 2 * branches;      // add-compare-select
  }
  // Pilot-terminated boundaries: two reduced steps of m branches each.
  for (long long b = 0; b < n_p - 1; ++b) {
    for (int side = 0; side < 2; ++side) {
      c.r_a += 3 * m;
      c.r_m += 4 + 2 * m;
    }
    c.r_a += m;  // surviving-path extension
  }
  return c;
}

double weighted_cost(const OpCounts& c, const PowerWeights& w) {
  if (!(w.w_add > 0.0 && w.w_mul > 0.0 && w.w_div > 0.0))
    throw std::invalid_argument("PowerWeights must be positive");
  return c.r_a * w.w_add + c.r_m * w.w_mul + c.r_d * w.w_div;
}

double relative_power(const OpCounts& a, const OpCounts& b, const PowerWeights& w) {
  const double den = weighted_cost(b, w);
  if (den == 0.0) throw std::invalid_argument("relative_power: zero denominator");
  return weighted_cost(a, w) / den;
}

}  // namespace d3ofdm
