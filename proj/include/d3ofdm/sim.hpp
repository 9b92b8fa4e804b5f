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

#ifndef D3OFDM_SIM_HPP
#define D3OFDM_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "d3ofdm/analysis.hpp"
#include "d3ofdm/channel.hpp"
#include "d3ofdm/constellation.hpp"
#include "d3ofdm/layout.hpp"

namespace d3ofdm {

/// How often an independent channel draw happens: once per OFDM symbol
/// (segments within a symbol share it) or once per detection segment.
enum class ChannelGranularity { PerSymbol, PerSegment };

struct FecSettings {
  bool enabled = false;
  bool interleaver = true;
};

/// One plotted curve: a detector plus its layout/constellation/branch count
/// and optional mobility or coding overrides.
struct CurveSpec {
  std::string label;
  std::string detector;  // coherent | coherent-l | coherent-s | glrt |
                         // d3-bf | d3-va | d3-simo | d3-rb | d3-coded
  SegmentLayout segment{SegmentLayout::Mode::SS, 2};
  const Constellation* constellation = &Constellation::bpsk();
  int branches = 1;
  double speed_kmh = 0.0;
  FecSettings fec;
  int coded_info_bits = 8;  // block size for the enumerable joint detector
};

struct ExperimentConfig {
  std::string name = "experiment";
  OfdmParams ofdm;
  TapProfile profile = TapProfile::named("flat");
  ChannelGranularity granularity = ChannelGranularity::PerSymbol;
  double carrier_hz = 1.9e9;
  bool use_rb = false;
  RbLayout rb = RbLayout::lte_default();
  std::vector<CurveSpec> curves;
  std::vector<double> snr_db;
  long long min_bits = 100000;
  long long min_bit_errors = 100;
  long long max_symbols = 2000000;
  std::uint64_t seed = 1;
  std::string out_csv;
  std::string out_dat;
};

/// One measured point. ci_low/ci_high bracket the BER at 95% using a
/// cluster-robust standard error (clusters = independent channel draws), so
/// per-symbol fading correlation does not fake precision. `saturated` records
/// whether the bit-error target was reached before the symbol budget ran out.
struct BerRecord {
  std::string detector;
  double snr_db = 0.0;
  long long bits = 0;
  long long bit_errors = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long long seq_errors = 0;
  long long seqs = 0;
  double ser = 0.0;
  double se = 0.0;  // cluster-robust standard error of the BER (not emitted)
  bool saturated = true;
};

/// Parse a configuration document. Unknown keys are rejected. A top-level
/// "scenario" key loads a registry entry first; remaining keys override it.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

/// Built-in scenario registry (name -> config document / description).
std::vector<std::pair<std::string, std::string>> scenario_list();
nlohmann::json scenario_config(const std::string& name);

/// Run every (curve, SNR) point. Deterministic for a fixed (config, seed)
/// regardless of worker count: per-trial streams are derived from
/// (seed, curve, snr index, trial index) and stopping is evaluated on fixed
/// batch boundaries. workers = 0 picks the hardware concurrency.
std::vector<BerRecord> run_experiment(const ExperimentConfig& cfg, int workers = 0);

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records);

/// Write outputs; existing files are refused unless force is set.
void write_ber_csv_file(const std::string& path, const std::vector<BerRecord>& records,
                        bool force);
void write_dat_file(const std::string& path, const std::vector<BerRecord>& records,
                    bool force);

// ---- theory sweep -----------------------------------------------------------

struct TheoryRow {
  int k = 2;
  std::string mode;  // "ss" | "ds"
  int n_branches = 1;
  double snr_db = 0.0;
  SepPrediction pred;
};

/// Evaluate analysis predictions over an SNR grid from a config document with
/// keys {curves: [{k, mode, n_branches}], snr_db: [...], methods: [...]}.
/// Methods: "spec" (closed form where published, quadrature otherwise),
/// "quadrature", "quadrature-approx", "pair-exact".
std::vector<TheoryRow> theory_sweep(const nlohmann::json& doc);

void write_theory_csv(std::ostream& os, const std::vector<TheoryRow>& rows);

}  // namespace d3ofdm

#endif
