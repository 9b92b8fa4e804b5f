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

#include <doctest.h>

#include "d3ofdm/complexity.hpp"
#include "d3ofdm/rng.hpp"

using namespace d3ofdm;

TEST_CASE("conventional_ops: division anchors and QAM arithmetic") {
  CHECK(conventional_ops(128, 32, 1, Modulus::CM).r_d == 96);
  CHECK(conventional_ops(2048, 512, 1, Modulus::CM).r_d == 1536);
  // Divisions don't depend on the alphabet parameter for the CM chain.
  CHECK(conventional_ops(128, 32, 4, Modulus::CM).r_d == 96);

  const OpCounts q = conventional_ops(512, 128, 16, Modulus::QAM);
  CHECK(q.r_d == 128 + 2 * 16 * 384);
  CHECK(q.r_a == 6 * 128 + (13 + 32) * 384);
  CHECK(q.r_m == 8 * 128 + (12 + 64) * 384);
}

TEST_CASE("d3_ops: division-free CM detection, QAM division count") {
  for (auto [n, np] : {std::pair{128LL, 32LL}, {512LL, 128LL}, {2048LL, 512LL}}) {
    CHECK(d3_ops(n, np, 1, Modulus::CM).r_d == 0);
    CHECK(d3_ops(n, np, 2, Modulus::CM).r_d == 0);
  }
  CHECK(d3_ops(512, 128, 16, Modulus::QAM).r_d == 2 * 16 * 128 + 4 * 16 * 384);
  CHECK(d3_ops(512, 128, 16, Modulus::QAM).r_d == 28672);
  CHECK_THROWS_AS(d3_ops(128, 64, 1, Modulus::CM), std::invalid_argument);
}

TEST_CASE("walked counters reproduce the closed formulas exactly") {
  RngStream rng(80, 0);
  for (int t = 0; t < 5; ++t) {
    const long long m = 1 + static_cast<long long>(rng.next_below(4));
    const long long n = 128LL << rng.next_below(5);
    const long long np = n / (4 + static_cast<long long>(rng.next_below(4)));
    const OpCounts conv_f = conventional_ops(n, np, m, Modulus::CM);
    const OpCounts conv_w = conventional_ops_walked(n, np, m);
    CHECK(conv_f.r_a == conv_w.r_a);
    CHECK(conv_f.r_m == conv_w.r_m);
    CHECK(conv_f.r_d == conv_w.r_d);

    const OpCounts d3_f = d3_ops(n, np, m, Modulus::CM);
    const OpCounts d3_w = d3_ops_walked(n, np, m);
    CHECK(d3_f.r_a == d3_w.r_a);
    CHECK(d3_f.r_m == d3_w.r_m);
    CHECK(d3_f.r_d == d3_w.r_d);
  }
}

TEST_CASE("counts scale affinely in n at a fixed pilot ratio") {
  for (const Modulus mod : {Modulus::CM, Modulus::QAM}) {
    const OpCounts a = conventional_ops(256, 64, 2, mod);
    const OpCounts b = conventional_ops(512, 128, 2, mod);
    const OpCounts c = conventional_ops(1024, 256, 2, mod);
    CHECK(c.r_a - b.r_a == 2 * (b.r_a - a.r_a));
    CHECK(c.r_m - b.r_m == 2 * (b.r_m - a.r_m));
    CHECK(c.r_d - b.r_d == 2 * (b.r_d - a.r_d));
  }
}

TEST_CASE("coded_va_ops: soft and hard anchors, ratio trend") {
  CHECK(coded_va_ops(2048, 7, Decision::Soft).r_a == 262144);
  CHECK(coded_va_ops(2048, 7, Decision::Soft).r_m == 262144);
  CHECK(coded_va_ops(2048, 3, Decision::Hard).r_a == 20480);
  CHECK(coded_va_ops(2048, 3, Decision::Hard).r_m == 0);
  CHECK_THROWS_AS(coded_va_ops(2048, 2, Decision::Soft), std::invalid_argument);

  // Whole-receiver cost (detector plus decoder): the hard/soft ratio falls
  // with the constraint length as the decoder comes to dominate.
  const PowerWeights w;
  const double det = weighted_cost(d3_ops(2048, 512, 1, Modulus::CM), w);
  double prev = 1e9;
  for (int k = 3; k <= 7; ++k) {
    const double hard = det + weighted_cost(coded_va_ops(2048, k, Decision::Hard), w);
    const double soft = det + weighted_cost(coded_va_ops(2048, k, Decision::Soft), w);
    CHECK(hard / soft < prev);
    prev = hard / soft;
  }
}

TEST_CASE("relative_power: identity and weight-scale invariance") {
  const OpCounts a = d3_ops(512, 128, 1, Modulus::CM);
  const OpCounts b = conventional_ops(512, 128, 1, Modulus::CM);
  PowerWeights w;
  CHECK(relative_power(a, a, w) == doctest::Approx(1.0));
  const double eta = relative_power(a, b, w);
  w.w_add *= 2.0;
  w.w_mul *= 2.0;
  w.w_div *= 2.0;
  CHECK(relative_power(a, b, w) == doctest::Approx(eta).epsilon(1e-12));
  CHECK_THROWS_AS(relative_power(a, OpCounts{}, w), std::invalid_argument);
}
