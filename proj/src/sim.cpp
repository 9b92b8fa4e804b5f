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

#include "d3ofdm/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "d3ofdm/detectors.hpp"
#include "d3ofdm/fec.hpp"
#include "d3ofdm/link.hpp"

namespace d3ofdm {

using nlohmann::json;

namespace {

// ---- fail-closed config parsing ------------------------------------------

void require_keys(const json& j, const std::set<std::string>& allowed, const char* ctx) {
  if (!j.is_object()) throw std::invalid_argument(std::string(ctx) + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument(std::string(ctx) + ": unknown key '" + key + "'");
}

TapProfile parse_profile(const json& j) {
  if (j.is_string()) return TapProfile::named(j.get<std::string>());
  require_keys(j, {"delays", "powers"}, "channel.profile");
  return TapProfile::custom(j.at("delays").get<std::vector<int>>(),
                            j.at("powers").get<std::vector<double>>());
}

SegmentLayout parse_segment_layout(const json& j) {
  require_keys(j, {"type", "mode", "k", "pilot_value"}, "layout");
  const std::string mode = j.at("mode").get<std::string>();
  std::complex<double> pilot{1.0, 0.0};
  if (j.contains("pilot_value")) {
    const auto pv = j.at("pilot_value").get<std::vector<double>>();
    if (pv.size() != 2) throw std::invalid_argument("layout.pilot_value: expected [re, im]");
    pilot = {pv[0], pv[1]};
  }
  if (mode == "ss") return {SegmentLayout::Mode::SS, j.at("k").get<int>(), pilot};
  if (mode == "ds") return {SegmentLayout::Mode::DS, j.at("k").get<int>(), pilot};
  throw std::invalid_argument("layout.mode: expected 'ss' or 'ds'");
}

RbLayout parse_rb_layout(const json& j) {
  require_keys(j, {"type", "pilot_cells"}, "layout");
  if (!j.contains("pilot_cells")) return RbLayout::lte_default();
  std::vector<std::pair<int, int>> cells;
  for (const auto& cell : j.at("pilot_cells")) {
    const auto rc = cell.get<std::vector<int>>();
    if (rc.size() != 2) throw std::invalid_argument("layout.pilot_cells: expected [row, col]");
    cells.emplace_back(rc[0] - 1, rc[1] - 1);  // config is 1-indexed
  }
  return RbLayout::with_cells(std::move(cells));
}

FecSettings parse_fec(const json& j) {
  require_keys(j, {"enabled", "interleaver"}, "fec");
  FecSettings f;
  if (j.contains("enabled")) f.enabled = j.at("enabled").get<bool>();
  if (j.contains("interleaver")) {
    if (j.at("interleaver").is_string()) {
      const std::string s = j.at("interleaver").get<std::string>();
      if (s != "on" && s != "off") throw std::invalid_argument("fec.interleaver: 'on' or 'off'");
      f.interleaver = s == "on";
    } else {
      f.interleaver = j.at("interleaver").get<bool>();
    }
  }
  return f;
}

const std::set<std::string> kDetectorNames = {
    "coherent", "coherent-l", "coherent-s", "glrt", "d3-bf",
    "d3-va",    "d3-simo",    "d3-rb",      "d3-coded"};

}  // namespace

std::vector<std::pair<std::string, std::string>> scenario_list() {
  return {
      {"flat-ss-k2-bpsk", "single-sided k=2 BPSK over flat Rayleigh fading"},
      {"fig-flat-ss-ds", "SS/DS segment lengths over flat fading, BPSK"},
      {"fig-freq-selective-kd1", "one data symbol per segment over the severe 6-tap channel"},
      {"fig-simo-flat", "1x2 receive diversity over flat fading, SS and DS"},
      {"fig-freq-selective", "QPSK k=7 DS detector comparison over the 6-tap channel"},
      {"fig-detectors-k7ds", "BPSK k=7 DS detector comparison over the 6-tap channel"},
      {"fig-16qam-k7ds", "16-QAM k=7 DS detector comparison over the 6-tap channel"},
      {"fig-rb-mobility", "full resource-block detection under mobility"},
      {"fig-coded", "(171,131) hard-decision coded chain with/without interleaving"},
  };
}

json scenario_config(const std::string& name) {
  static const std::map<std::string, const char*> registry = {
      {"flat-ss-k2-bpsk", R"({
        "name": "flat-ss-k2-bpsk",
        "channel": {"profile": "flat", "granularity": "per_segment"},
        "constellation": "bpsk",
        "layout": {"type": "segment", "mode": "ss", "k": 2},
        "detectors": ["d3-bf", "coherent"],
        "snr_db": [0, 5, 10, 15, 20],
        "min_bits": 200000
      })"},
      {"fig-flat-ss-ds", R"({
        "name": "fig-flat-ss-ds",
        "channel": {"profile": "flat", "granularity": "per_segment"},
        "constellation": "bpsk",
        "curves": [
          {"label": "d3-ss-k2", "detector": "d3-va", "layout": {"type": "segment", "mode": "ss", "k": 2}},
          {"label": "d3-ss-k6", "detector": "d3-va", "layout": {"type": "segment", "mode": "ss", "k": 6}},
          {"label": "d3-ds-k3", "detector": "d3-va", "layout": {"type": "segment", "mode": "ds", "k": 3}},
          {"label": "d3-ds-k7", "detector": "d3-va", "layout": {"type": "segment", "mode": "ds", "k": 7}},
          {"label": "coherent", "detector": "coherent", "layout": {"type": "segment", "mode": "ss", "k": 2}}
        ],
        "snr_db": [0, 5, 10, 15, 20, 25, 30],
        "min_bits": 200000
      })"},
      {"fig-freq-selective-kd1", R"({
        "name": "fig-freq-selective-kd1",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "bpsk",
        "curves": [
          {"label": "d3-ss-k2", "detector": "d3-va", "layout": {"type": "segment", "mode": "ss", "k": 2}},
          {"label": "d3-ds-k3", "detector": "d3-va", "layout": {"type": "segment", "mode": "ds", "k": 3}},
          {"label": "coherent", "detector": "coherent", "layout": {"type": "segment", "mode": "ss", "k": 2}}
        ],
        "snr_db": [0, 5, 10, 15, 20, 25, 30, 35, 40],
        "min_bits": 200000
      })"},
      {"fig-simo-flat", R"({
        "name": "fig-simo-flat",
        "channel": {"profile": "flat", "granularity": "per_segment"},
        "constellation": "bpsk",
        "curves": [
          {"label": "d3-ss-n1", "detector": "d3-va", "layout": {"type": "segment", "mode": "ss", "k": 2}},
          {"label": "d3-ss-n2", "detector": "d3-simo", "branches": 2, "layout": {"type": "segment", "mode": "ss", "k": 2}},
          {"label": "d3-ds-n1", "detector": "d3-va", "layout": {"type": "segment", "mode": "ds", "k": 3}},
          {"label": "d3-ds-n2", "detector": "d3-simo", "branches": 2, "layout": {"type": "segment", "mode": "ds", "k": 3}},
          {"label": "glrt-n2", "detector": "glrt", "branches": 2, "layout": {"type": "segment", "mode": "ss", "k": 2}},
          {"label": "mrc-coherent", "detector": "coherent", "branches": 2, "layout": {"type": "segment", "mode": "ss", "k": 2}}
        ],
        "snr_db": [0, 5, 10, 15, 20, 25],
        "min_bits": 200000
      })"},
      {"fig-freq-selective", R"({
        "name": "fig-freq-selective",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "qpsk",
        "layout": {"type": "segment", "mode": "ds", "k": 7},
        "detectors": ["d3-va", "coherent", "coherent-l", "coherent-s", "glrt"],
        "snr_db": [0, 5, 10, 15, 20, 25, 30, 35, 40],
        "min_bits": 100000
      })"},
      {"fig-detectors-k7ds", R"({
        "name": "fig-detectors-k7ds",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "bpsk",
        "layout": {"type": "segment", "mode": "ds", "k": 7},
        "detectors": ["d3-va", "d3-bf", "glrt", "coherent", "coherent-l"],
        "snr_db": [0, 5, 10, 15, 20, 25, 30, 35],
        "min_bits": 200000
      })"},
      {"fig-16qam-k7ds", R"({
        "name": "fig-16qam-k7ds",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "16qam",
        "layout": {"type": "segment", "mode": "ds", "k": 7},
        "detectors": ["d3-va", "glrt", "coherent", "coherent-l", "coherent-s"],
        "snr_db": [10, 15, 20, 25, 30, 35, 40],
        "min_bits": 100000
      })"},
      {"fig-rb-mobility", R"({
        "name": "fig-rb-mobility",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "bpsk",
        "layout": {"type": "rb"},
        "carrier_hz": 1.9e9,
        "curves": [
          {"label": "d3-rb-v50", "detector": "d3-rb", "speed_kmh": 50},
          {"label": "d3-rb-v300", "detector": "d3-rb", "speed_kmh": 300},
          {"label": "coherent-l-v50", "detector": "coherent-l", "speed_kmh": 50},
          {"label": "coherent-l-v300", "detector": "coherent-l", "speed_kmh": 300},
          {"label": "coherent-v300", "detector": "coherent", "speed_kmh": 300}
        ],
        "snr_db": [10, 15, 20, 25, 30, 35, 40],
        "min_bits": 100000
      })"},
      {"fig-coded", R"({
        "name": "fig-coded",
        "channel": {"profile": "tux6", "granularity": "per_symbol"},
        "constellation": "bpsk",
        "layout": {"type": "segment", "mode": "ds", "k": 7},
        "curves": [
          {"label": "d3-il", "detector": "d3-va", "fec": {"enabled": true, "interleaver": "on"}},
          {"label": "cohl-il", "detector": "coherent-l", "fec": {"enabled": true, "interleaver": "on"}},
          {"label": "d3-noil", "detector": "d3-va", "fec": {"enabled": true, "interleaver": "off"}},
          {"label": "cohl-noil", "detector": "coherent-l", "fec": {"enabled": true, "interleaver": "off"}},
          {"label": "coherent-il", "detector": "coherent", "fec": {"enabled": true, "interleaver": "on"}}
        ],
        "snr_db": [4, 6, 8, 10, 12, 14],
        "min_bits": 150000,
        "max_symbols": 30000
      })"},
  };
  auto it = registry.find(name);
  if (it == registry.end())
    throw std::invalid_argument("unknown scenario '" + name + "'");
  return json::parse(it->second);
}

ExperimentConfig parse_experiment_config(const json& user_doc) {
  json doc = user_doc;
  if (doc.contains("scenario")) {
    json base = scenario_config(doc.at("scenario").get<std::string>());
    doc.erase("scenario");
    for (const auto& [key, value] : doc.items()) base[key] = value;
    doc = base;
  }

  require_keys(doc,
               {"name", "ofdm", "channel", "carrier_hz", "constellation", "layout",
                "detectors", "curves", "snr_db", "min_bits", "min_bit_errors",
                "max_symbols", "seed", "fec", "output"},
               "config");

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();

  if (doc.contains("ofdm")) {
    const json& jo = doc.at("ofdm");
    require_keys(jo, {"n", "n_cp", "sample_rate_hz", "subcarrier_spacing_hz"}, "ofdm");
    if (jo.contains("n")) cfg.ofdm.n = jo.at("n").get<int>();
    if (jo.contains("n_cp")) cfg.ofdm.n_cp = jo.at("n_cp").get<int>();
    if (jo.contains("sample_rate_hz")) cfg.ofdm.sample_rate_hz = jo.at("sample_rate_hz").get<double>();
    if (jo.contains("subcarrier_spacing_hz"))
      cfg.ofdm.subcarrier_spacing_hz = jo.at("subcarrier_spacing_hz").get<double>();
  }
  cfg.ofdm.validate();

  if (doc.contains("channel")) {
    const json& jc = doc.at("channel");
    require_keys(jc, {"profile", "granularity"}, "channel");
    if (jc.contains("profile")) cfg.profile = parse_profile(jc.at("profile"));
    if (jc.contains("granularity")) {
      const std::string g = jc.at("granularity").get<std::string>();
      if (g == "per_symbol")
        cfg.granularity = ChannelGranularity::PerSymbol;
      else if (g == "per_segment")
        cfg.granularity = ChannelGranularity::PerSegment;
      else
        throw std::invalid_argument("channel.granularity: 'per_symbol' or 'per_segment'");
    }
  }
  if (cfg.profile.max_delay() > cfg.ofdm.n_cp)
    throw std::invalid_argument("config: channel delay spread exceeds the cyclic prefix");
  if (doc.contains("carrier_hz")) cfg.carrier_hz = doc.at("carrier_hz").get<double>();

  const Constellation* default_const = &Constellation::bpsk();
  if (doc.contains("constellation"))
    default_const = &Constellation::by_name(doc.at("constellation").get<std::string>());

  SegmentLayout default_segment{SegmentLayout::Mode::SS, 2};
  if (doc.contains("layout")) {
    const json& jl = doc.at("layout");
    const std::string type = jl.value("type", "segment");
    if (type == "rb") {
      cfg.use_rb = true;
      cfg.rb = parse_rb_layout(jl);
    } else if (type == "segment") {
      default_segment = parse_segment_layout(jl);
    } else {
      throw std::invalid_argument("layout.type: 'segment' or 'rb'");
    }
  }

  FecSettings default_fec;
  if (doc.contains("fec")) default_fec = parse_fec(doc.at("fec"));

  if (doc.contains("detectors") == doc.contains("curves"))
    throw std::invalid_argument("config: provide exactly one of 'detectors' or 'curves'");

  auto make_curve = [&](const json& jc) {
    CurveSpec c;
    require_keys(jc,
                 {"label", "detector", "layout", "constellation", "branches", "speed_kmh",
                  "fec", "coded_info_bits"},
                 "curve");
    c.detector = jc.at("detector").get<std::string>();
    if (!kDetectorNames.count(c.detector))
      throw std::invalid_argument("unknown detector '" + c.detector + "'");
    c.label = jc.contains("label") ? jc.at("label").get<std::string>() : c.detector;
    c.segment = jc.contains("layout") ? parse_segment_layout(jc.at("layout")) : default_segment;
    c.constellation = jc.contains("constellation")
                          ? &Constellation::by_name(jc.at("constellation").get<std::string>())
                          : default_const;
    if (jc.contains("branches")) c.branches = jc.at("branches").get<int>();
    if (jc.contains("speed_kmh")) c.speed_kmh = jc.at("speed_kmh").get<double>();
    c.fec = jc.contains("fec") ? parse_fec(jc.at("fec")) : default_fec;
    if (jc.contains("coded_info_bits")) c.coded_info_bits = jc.at("coded_info_bits").get<int>();
    if (c.branches < 1) throw std::invalid_argument("curve.branches must be >= 1");
    return c;
  };

  if (doc.contains("detectors")) {
    for (const auto& d : doc.at("detectors")) {
      json jc;
      jc["detector"] = d.get<std::string>();
      cfg.curves.push_back(make_curve(jc));
    }
  } else {
    for (const auto& jc : doc.at("curves")) cfg.curves.push_back(make_curve(jc));
  }
  if (cfg.curves.empty()) throw std::invalid_argument("config: no curves");

  cfg.snr_db = doc.at("snr_db").get<std::vector<double>>();
  if (cfg.snr_db.empty()) throw std::invalid_argument("config: snr grid must be non-empty");
  if (doc.contains("min_bits")) cfg.min_bits = doc.at("min_bits").get<long long>();
  if (cfg.min_bits < 10000) throw std::invalid_argument("config: min_bits must be >= 10000");
  if (doc.contains("min_bit_errors")) cfg.min_bit_errors = doc.at("min_bit_errors").get<long long>();
  if (doc.contains("max_symbols")) cfg.max_symbols = doc.at("max_symbols").get<long long>();
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();

  if (doc.contains("output")) {
    const json& jo = doc.at("output");
    require_keys(jo, {"csv", "dat"}, "output");
    if (jo.contains("csv")) cfg.out_csv = jo.at("csv").get<std::string>();
    if (jo.contains("dat")) cfg.out_dat = jo.at("dat").get<std::string>();
  }
  if (cfg.out_csv.empty()) cfg.out_csv = cfg.name + ".csv";
  if (cfg.out_dat.empty()) cfg.out_dat = cfg.name + ".dat";

  for (const auto& c : cfg.curves) {
    if (c.detector == "d3-rb" && !cfg.use_rb)
      throw std::invalid_argument("d3-rb requires an 'rb' layout");
    if (cfg.use_rb && (c.detector == "glrt" || c.detector == "d3-bf" || c.detector == "d3-va" ||
                       c.detector == "d3-simo" || c.detector == "d3-coded"))
      throw std::invalid_argument("detector '" + c.detector + "' needs a segment layout");
    if (c.fec.enabled && (c.detector == "d3-rb" || c.detector == "glrt"))
      throw std::invalid_argument("coded chain supports coherent and d3 segment detectors");
    if (c.detector == "d3-coded") {
      if (c.coded_info_bits < 1 || c.coded_info_bits > 14)
        throw std::invalid_argument("d3-coded: coded_info_bits in [1, 14]");
    }
  }
  return cfg;
}

// ---- Monte Carlo core -------------------------------------------------------

namespace {

struct Accum {
  long long bits = 0, errs = 0, seqs = 0, seq_errs = 0, symbols = 0;
  double e2 = 0.0, eb = 0.0, b2 = 0.0;

  void add_cluster(long long e, long long b) {
    errs += e;
    bits += b;
    e2 += static_cast<double>(e) * e;
    eb += static_cast<double>(e) * b;
    b2 += static_cast<double>(b) * b;
  }
  void merge(const Accum& o) {
    bits += o.bits;
    errs += o.errs;
    seqs += o.seqs;
    seq_errs += o.seq_errs;
    symbols += o.symbols;
    e2 += o.e2;
    eb += o.eb;
    b2 += o.b2;
  }
};

std::uint64_t stream_of(int curve_idx, int snr_idx, std::uint64_t trial_idx) {
  return (static_cast<std::uint64_t>(curve_idx) << 56) |
         (static_cast<std::uint64_t>(snr_idx) << 48) | trial_idx;
}

std::vector<std::uint8_t> random_bits(RngStream& rng, long long count) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  return bits;
}

// CFR over `len` adjacent bins starting at a random offset (wrapping).
Eigen::ArrayXcd cfr_window(const ChannelRealization& cr, int v0, int len) {
  Eigen::ArrayXcd h(len);
  const int n = static_cast<int>(cr.cfr.size());
  for (int i = 0; i < len; ++i) h[i] = cr.cfr[(v0 + i) % n];
  return h;
}

struct PointContext {
  const ExperimentConfig* cfg;
  const CurveSpec* curve;
  double sigma_w_sq;
  FrameLayout frame;                         // segment scenarios
  MobilityModel mobility;                    // RB scenarios
  std::vector<Eigen::ArrayXcd> codebook;     // d3-coded
  std::vector<std::vector<std::uint8_t>> codebook_info;
};

// Detect every segment of a frame and return the fully decided symbol vector.
Eigen::ArrayXcd detect_frame_segments(const PointContext& ctx,
                                      const std::vector<Eigen::ArrayXcd>& r_branches,
                                      const std::vector<Eigen::ArrayXcd>& gains) {
  const CurveSpec& cv = *ctx.curve;
  const FrameLayout& frame = ctx.frame;
  const int n = static_cast<int>(r_branches.front().size());
  Eigen::ArrayXcd decided(n);
  for (int p : frame.pilots) decided[p] = frame.base.pilot_value;

  if (cv.detector == "coherent") {
    const CoherentResult res = coherent_mld(r_branches, gains, *cv.constellation);
    for (int v : frame.data_cells) decided[v] = res.symbols[v];
    return decided;
  }

  if (cv.detector == "coherent-l" || cv.detector == "coherent-s") {
    const InterpKind kind =
        cv.detector == "coherent-l" ? InterpKind::Linear : InterpKind::Spline;
    if (r_branches.size() == 1) {
      const CsiEstimate est = ls_estimate_interpolate(r_branches[0], frame, kind);
      const ZfResult zf = zf_equalize(r_branches[0], est.h_hat);
      for (int v : frame.data_cells)
        decided[v] = cv.constellation->point(cv.constellation->nearest(zf.equalized[v]));
    } else {
      std::vector<Eigen::ArrayXcd> est(r_branches.size());
      for (std::size_t b = 0; b < r_branches.size(); ++b)
        est[b] = ls_estimate_interpolate(r_branches[b], frame, kind).h_hat;
      const CoherentResult res = coherent_mld(r_branches, est, *cv.constellation);
      for (int v : frame.data_cells) decided[v] = res.symbols[v];
    }
    return decided;
  }

  // Segment-wise sequence detectors.
  for (const auto& [begin, end] : frame.segments) {
    const int len = end - begin;
    std::vector<Eigen::ArrayXcd> win(r_branches.size());
    for (std::size_t b = 0; b < r_branches.size(); ++b)
      win[b] = r_branches[b].segment(begin, len);
    Anchors anchors;
    for (int p = begin; p < end; ++p)
      if (frame.is_pilot(p)) anchors.emplace_back(p - begin, frame.base.pilot_value);

    DetectionResult det;
    if (cv.detector == "glrt") {
      // Exhaustive search with the window's pilots pinned.
      SegmentLayout pseudo = frame.base;
      pseudo.k = len;
      if (pseudo.mode == SegmentLayout::Mode::DS && anchors.size() < 2)
        pseudo.mode = SegmentLayout::Mode::SS;
      det = glrt_mlsd(win, pseudo, *cv.constellation);
    } else if (cv.detector == "d3-bf") {
      det = d3_bruteforce_anchored(win, anchors, *cv.constellation);
    } else {
      det = d3_viterbi_anchored(win, anchors, *cv.constellation);
    }

    Eigen::Index di = 0;
    for (int p = begin; p < end; ++p)
      if (!frame.is_pilot(p)) decided[p] = det.symbols[di++];
  }
  return decided;
}

// One uncoded frame/segment trial.
void trial_uncoded(const PointContext& ctx, std::uint64_t stream, Accum& acc) {
  const ExperimentConfig& cfg = *ctx.cfg;
  const CurveSpec& cv = *ctx.curve;
  RngStream rng(cfg.seed, stream);
  const Constellation& cons = *cv.constellation;

  if (cfg.granularity == ChannelGranularity::PerSegment) {
    // One pilot-anchored window with its own channel draw.
    const SegmentLayout& seg = cv.segment;
    const int len = seg.k;
    std::vector<std::uint8_t> bits = random_bits(rng, seg.data_count() * cons.bits_per_symbol());
    const Eigen::ArrayXcd data = map_bits(bits, cons);
    const Eigen::ArrayXcd tx = build_segment(data, seg);

    std::vector<Eigen::ArrayXcd> r(static_cast<std::size_t>(cv.branches));
    std::vector<Eigen::ArrayXcd> gains(static_cast<std::size_t>(cv.branches));
    const int v0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.ofdm.n)));
    for (int b = 0; b < cv.branches; ++b) {
      gains[static_cast<std::size_t>(b)] =
          sample_cfr_window(cfg.profile, cfg.ofdm.n, v0, len, rng);
      r[static_cast<std::size_t>(b)] =
          apply_channel_freq(tx, gains[static_cast<std::size_t>(b)], ctx.sigma_w_sq, rng);
    }

    DetectionResult det;
    if (cv.detector == "coherent") {
      const CoherentResult res = coherent_mld(r, gains, cons);
      det.symbols = extract_segment_data(res.symbols, seg);
      det.bits = demap_bits(det.symbols, cons);
    } else if (cv.detector == "glrt") {
      det = glrt_mlsd(r, seg, cons);
    } else if (cv.detector == "d3-bf") {
      det = d3_bruteforce_anchored(r, anchors_of(seg), cons);
    } else {
      det = d3_viterbi_anchored(r, anchors_of(seg), cons);
    }

    long long err = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) err += bits[i] != det.bits[i];
    acc.add_cluster(err, static_cast<long long>(bits.size()));
    acc.seqs += 1;
    acc.seq_errs += err > 0;
    acc.symbols += 1;
    return;
  }

  // Whole OFDM symbol through the time-domain chain (frequency-domain
  // shortcut for multi-branch reception).
  const FrameLayout& frame = ctx.frame;
  std::vector<std::uint8_t> bits = random_bits(rng, frame.data_count() * cons.bits_per_symbol());
  const Eigen::ArrayXcd d = build_frame(map_bits(bits, cons), frame);

  std::vector<Eigen::ArrayXcd> r(static_cast<std::size_t>(cv.branches));
  std::vector<Eigen::ArrayXcd> gains(static_cast<std::size_t>(cv.branches));
  for (int b = 0; b < cv.branches; ++b) {
    const ChannelRealization cr = sample_realization(cfg.profile, cfg.ofdm.n, rng);
    gains[static_cast<std::size_t>(b)] = cr.cfr;
    if (cv.branches == 1) {
      const Eigen::ArrayXcd x = transmit(d, cfg.ofdm);
      const Eigen::ArrayXcd y = propagate(x, cr, cfg.ofdm, ctx.sigma_w_sq, rng);
      r[static_cast<std::size_t>(b)] = receive(y, cfg.ofdm);
    } else {
      r[static_cast<std::size_t>(b)] = apply_channel_freq(d, cr.cfr, ctx.sigma_w_sq, rng);
    }
  }

  const Eigen::ArrayXcd decided = detect_frame_segments(ctx, r, gains);

  // Bit errors per segment; each segment is one detected sequence.
  std::vector<std::uint8_t> got, want;
  for (const auto& [begin, end] : frame.segments) {
    got.clear();
    want.clear();
    for (int p = begin; p < end; ++p) {
      if (frame.is_pilot(p)) continue;
      cons.bits_of(cons.nearest(decided[p]), got);
      cons.bits_of(cons.nearest(d[p]), want);
    }
    long long err = 0;
    for (std::size_t i = 0; i < got.size(); ++i) err += got[i] != want[i];
    acc.add_cluster(err, static_cast<long long>(got.size()));
    acc.seqs += 1;
    acc.seq_errs += err > 0;
  }
  acc.symbols += 1;
}

// One resource-block trial: the channel evolves across the grid's columns.
void trial_rb(const PointContext& ctx, std::uint64_t stream, Accum& acc) {
  const ExperimentConfig& cfg = *ctx.cfg;
  const CurveSpec& cv = *ctx.curve;
  RngStream rng(cfg.seed, stream);
  const Constellation& cons = *cv.constellation;
  const RbLayout& rb = cfg.rb;

  std::vector<std::uint8_t> bits = random_bits(rng, rb.data_count() * cons.bits_per_symbol());
  const Eigen::ArrayXXcd grid = build_rb(map_bits(bits, cons), rb);

  const ChannelRealization init = sample_realization(cfg.profile, cfg.ofdm.n, rng);
  const auto seq = evolve(init, ctx.mobility, rb.cols, rng);
  const int v0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.ofdm.n - rb.rows)));

  Eigen::ArrayXXcd h(rb.rows, rb.cols), r(rb.rows, rb.cols);
  for (int c = 0; c < rb.cols; ++c)
    for (int row = 0; row < rb.rows; ++row) {
      h(row, c) = seq[static_cast<std::size_t>(c)].cfr[v0 + row];
      r(row, c) = h(row, c) * grid(row, c) + rng.next_cgauss(2.0 * ctx.sigma_w_sq);
    }

  Eigen::ArrayXXcd decided(rb.rows, rb.cols);
  if (cv.detector == "d3-rb") {
    decided = detect_resource_block(r, rb, cons);
  } else if (cv.detector == "coherent") {
    for (int c = 0; c < rb.cols; ++c)
      for (int row = 0; row < rb.rows; ++row) {
        int best = 0;
        double bm = 1e300;
        for (int i = 0; i < cons.size(); ++i) {
          const double m = std::norm(r(row, c) - h(row, c) * cons.point(i));
          if (m < bm) {
            bm = m;
            best = i;
          }
        }
        decided(row, c) = cons.point(best);
      }
  } else {
    // Pilot-aided baseline: estimate each pilot-bearing column across
    // frequency, hold the latest estimate across time.
    const InterpKind kind =
        cv.detector == "coherent-l" ? InterpKind::Linear : InterpKind::Spline;
    std::vector<int> pilot_cols;
    for (const auto& [rr, cc] : rb.pilot_cells)
      if (std::find(pilot_cols.begin(), pilot_cols.end(), cc) == pilot_cols.end())
        pilot_cols.push_back(cc);
    std::sort(pilot_cols.begin(), pilot_cols.end());

    std::map<int, Eigen::ArrayXcd> col_est;
    for (int pc : pilot_cols) {
      std::vector<int> pos;
      for (const auto& [rr, cc] : rb.pilot_cells)
        if (cc == pc) pos.push_back(rr);
      std::sort(pos.begin(), pos.end());
      Eigen::ArrayXcd vals(static_cast<Eigen::Index>(pos.size()));
      vals.setConstant(rb.pilot_value);
      col_est[pc] = ls_estimate_interpolate(r.col(pc), pos, vals, rb.rows, kind).h_hat;
    }
    for (int c = 0; c < rb.cols; ++c) {
      int use = pilot_cols.front();
      for (int pc : pilot_cols)
        if (pc <= c) use = pc;
      const Eigen::ArrayXcd& hh = col_est[use];
      for (int row = 0; row < rb.rows; ++row) {
        const std::complex<double> eq =
            hh[row] == std::complex<double>{0.0, 0.0} ? std::complex<double>{0.0, 0.0}
                                                      : r(row, c) / hh[row];
        decided(row, c) = cons.point(cons.nearest(eq));
      }
    }
  }

  long long err = 0, total = 0;
  std::vector<std::uint8_t> got, want;
  for (int row = 0; row < rb.rows; ++row)
    for (int c = 0; c < rb.cols; ++c) {
      if (rb.is_pilot(row, c)) continue;
      got.clear();
      want.clear();
      cons.bits_of(cons.nearest(decided(row, c)), got);
      cons.bits_of(cons.nearest(grid(row, c)), want);
      for (std::size_t i = 0; i < got.size(); ++i) err += got[i] != want[i];
      total += static_cast<long long>(got.size());
    }
  acc.add_cluster(err, total);
  acc.seqs += 1;
  acc.seq_errs += err > 0;
  acc.symbols += rb.cols;
}

// Coded chain: encode, (inter)leave, carry over OFDM symbols, detect, decode.
void trial_coded(const PointContext& ctx, std::uint64_t stream, Accum& acc) {
  const ExperimentConfig& cfg = *ctx.cfg;
  const CurveSpec& cv = *ctx.curve;
  RngStream rng(cfg.seed, stream);
  const Constellation& cons = *cv.constellation;
  const FrameLayout& frame = ctx.frame;
  const int bps = cons.bits_per_symbol();
  const long long frame_bits = static_cast<long long>(frame.data_count()) * bps;

  constexpr int kInfoPerBlock = 256;
  const int coded_per_block = 2 * (kInfoPerBlock + 6);

  const bool il = cv.fec.interleaver;
  const long long blocks =
      il ? static_cast<long long>(BlockInterleaver::kBlock) / coded_per_block : 1;

  std::vector<std::uint8_t> info = random_bits(rng, blocks * kInfoPerBlock);
  std::vector<std::uint8_t> coded;
  coded.reserve(static_cast<std::size_t>(blocks * coded_per_block));
  for (long long b = 0; b < blocks; ++b) {
    const std::vector<std::uint8_t> block(info.begin() + b * kInfoPerBlock,
                                          info.begin() + (b + 1) * kInfoPerBlock);
    const auto enc = conv_encode(block);
    coded.insert(coded.end(), enc.begin(), enc.end());
  }
  const std::size_t coded_size = coded.size();
  std::vector<std::uint8_t> tx_bits = il ? BlockInterleaver::interleave(coded) : coded;

  // Without interleaving the channel is effectively static over a code block.
  ChannelRealization static_cr;
  if (!il) static_cr = sample_realization(cfg.profile, cfg.ofdm.n, rng);

  std::vector<std::uint8_t> rx_bits;
  rx_bits.reserve(tx_bits.size());
  std::size_t consumed = 0;
  while (consumed < tx_bits.size()) {
    std::vector<std::uint8_t> chunk(static_cast<std::size_t>(frame_bits), 0);
    const std::size_t take = std::min(tx_bits.size() - consumed, chunk.size());
    std::copy_n(tx_bits.begin() + static_cast<std::ptrdiff_t>(consumed), take, chunk.begin());
    for (std::size_t i = take; i < chunk.size(); ++i)
      chunk[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);  // filler
    consumed += take;

    const Eigen::ArrayXcd d = build_frame(map_bits(chunk, cons), frame);
    const ChannelRealization cr =
        il ? sample_realization(cfg.profile, cfg.ofdm.n, rng) : static_cr;
    const Eigen::ArrayXcd x = transmit(d, cfg.ofdm);
    const Eigen::ArrayXcd y = propagate(x, cr, cfg.ofdm, ctx.sigma_w_sq, rng);
    const Eigen::ArrayXcd rsym = receive(y, cfg.ofdm);

    std::vector<Eigen::ArrayXcd> rb{rsym};
    std::vector<Eigen::ArrayXcd> gb{cr.cfr};
    const Eigen::ArrayXcd decided = detect_frame_segments(ctx, rb, gb);

    std::vector<std::uint8_t> symbits;
    for (int v : frame.data_cells) cons.bits_of(cons.nearest(decided[v]), symbits);
    const std::size_t want = std::min(static_cast<std::size_t>(frame_bits),
                                      tx_bits.size() - (consumed - take));
    rx_bits.insert(rx_bits.end(), symbits.begin(),
                   symbits.begin() + static_cast<std::ptrdiff_t>(std::min(want, symbits.size())));
    acc.symbols += 1;
  }
  rx_bits.resize(tx_bits.size());

  const std::vector<std::uint8_t> rx_coded =
      il ? BlockInterleaver::deinterleave(rx_bits, coded_size) : rx_bits;

  for (long long b = 0; b < blocks; ++b) {
    const std::vector<std::uint8_t> cw(rx_coded.begin() + b * coded_per_block,
                                       rx_coded.begin() + (b + 1) * coded_per_block);
    const auto dec = viterbi_decode_hard(cw);
    long long err = 0;
    for (int i = 0; i < kInfoPerBlock; ++i)
      err += dec[static_cast<std::size_t>(i)] != info[static_cast<std::size_t>(b * kInfoPerBlock + i)];
    acc.add_cluster(err, kInfoPerBlock);
    acc.seqs += 1;
    acc.seq_errs += err > 0;
  }
}

// Joint detection over an enumerable codebook.
void trial_d3_coded(const PointContext& ctx, std::uint64_t stream, Accum& acc) {
  const ExperimentConfig& cfg = *ctx.cfg;
  RngStream rng(cfg.seed, stream);
  const Constellation& cons = *ctx.curve->constellation;

  const std::uint64_t word = rng.next_below(ctx.codebook.size());
  const Eigen::ArrayXcd& tx = ctx.codebook[word];
  const int len = static_cast<int>(tx.size());

  const ChannelRealization cr = sample_realization(cfg.profile, cfg.ofdm.n, rng);
  const int v0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.ofdm.n)));
  const Eigen::ArrayXcd h = cfr_window(cr, v0, len);
  const Eigen::ArrayXcd r = apply_channel_freq(tx, h, ctx.sigma_w_sq, rng);

  std::size_t best = 0;
  double bm = 1e300;
  for (std::size_t i = 0; i < ctx.codebook.size(); ++i) {
    const double m = d3_objective(ctx.codebook[i], r);
    if (m < bm) {
      bm = m;
      best = i;
    }
  }
  const auto& got = ctx.codebook_info[best];
  const auto& want = ctx.codebook_info[word];
  long long err = 0;
  for (std::size_t i = 0; i < got.size(); ++i) err += got[i] != want[i];
  acc.add_cluster(err, static_cast<long long>(got.size()));
  acc.seqs += 1;
  acc.seq_errs += err > 0;
  acc.symbols += 1;
  (void)cons;
}

BerRecord run_point(const ExperimentConfig& cfg, int curve_idx, int snr_idx, int workers) {
  const CurveSpec& cv = cfg.curves[static_cast<std::size_t>(curve_idx)];
  PointContext ctx;
  ctx.cfg = &cfg;
  ctx.curve = &cv;
  ctx.sigma_w_sq = noise_var_for_snr_db(cfg.snr_db[static_cast<std::size_t>(snr_idx)]);
  if (!cfg.use_rb) ctx.frame = FrameLayout::tile(cfg.ofdm.n, cv.segment);
  ctx.mobility = MobilityModel::from_speed(cv.speed_kmh / 3.6, cfg.carrier_hz,
                                           cfg.ofdm.symbol_period_s());

  if (cv.detector == "d3-coded") {
    const int info_len = cv.coded_info_bits;
    const std::uint64_t words = 1ULL << info_len;
    for (std::uint64_t wrd = 0; wrd < words; ++wrd) {
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(info_len));
      for (int i = 0; i < info_len; ++i) bits[static_cast<std::size_t>(i)] = (wrd >> i) & 1;
      const auto coded = conv_encode(bits);
      ctx.codebook.push_back(map_bits(coded, *cv.constellation));
      ctx.codebook_info.push_back(bits);
    }
  }

  auto run_trial = [&](std::uint64_t trial, Accum& acc) {
    const std::uint64_t stream = stream_of(curve_idx, snr_idx, trial);
    if (cv.detector == "d3-coded")
      trial_d3_coded(ctx, stream, acc);
    else if (cv.fec.enabled)
      trial_coded(ctx, stream, acc);
    else if (cfg.use_rb)
      trial_rb(ctx, stream, acc);
    else
      trial_uncoded(ctx, stream, acc);
  };

  // Batch size by trial weight; rounds have a fixed shape so the stopping
  // point is identical for every worker count. Exhaustive searches over wide
  // alphabets get tiny batches so the stop check can bound their overshoot.
  long long batch = 256;
  if (cfg.use_rb) batch = 32;
  if (cv.constellation->size() >= 16) {
    const bool exhaustive = cv.detector == "glrt" || cv.detector == "d3-bf";
    batch = exhaustive ? 2 : 16;
  }
  if (cv.fec.enabled) batch = cv.fec.interleaver ? 1 : 32;
  constexpr int kBatchesPerRound = 8;

  Accum total;
  std::uint64_t next_trial = 0;
  bool done = false;
  while (!done) {
    std::array<Accum, kBatchesPerRound> slot;
    const std::uint64_t round_base = next_trial;
    const int nthreads = std::max(1, std::min(workers, kBatchesPerRound));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (int b = t; b < kBatchesPerRound; b += nthreads) {
          Accum local;
          const std::uint64_t begin = round_base + static_cast<std::uint64_t>(b) * batch;
          for (long long i = 0; i < batch; ++i) run_trial(begin + static_cast<std::uint64_t>(i), local);
          slot[static_cast<std::size_t>(b)] = local;
        }
      });
    }
    for (auto& th : pool) th.join();

    for (int b = 0; b < kBatchesPerRound && !done; ++b) {
      total.merge(slot[static_cast<std::size_t>(b)]);
      next_trial += static_cast<std::uint64_t>(batch);
      const bool enough = total.bits >= cfg.min_bits && total.errs >= cfg.min_bit_errors;
      const bool budget = total.symbols >= cfg.max_symbols;
      if (enough || budget) done = true;
    }
  }

  BerRecord rec;
  rec.detector = cv.label;
  rec.snr_db = cfg.snr_db[static_cast<std::size_t>(snr_idx)];
  rec.bits = total.bits;
  rec.bit_errors = total.errs;
  rec.ber = total.bits ? static_cast<double>(total.errs) / total.bits : 0.0;
  rec.seqs = total.seqs;
  rec.seq_errors = total.seq_errs;
  rec.ser = total.seqs ? static_cast<double>(total.seq_errs) / total.seqs : 0.0;
  const double p = rec.ber;
  const double var = std::max(0.0, total.e2 - 2.0 * p * total.eb + p * p * total.b2);
  rec.se = total.bits ? std::sqrt(var) / total.bits : 0.0;
  rec.ci_low = std::max(0.0, p - 1.96 * rec.se);
  rec.ci_high = std::min(1.0, p + 1.96 * rec.se);
  rec.saturated = total.errs >= cfg.min_bit_errors;
  return rec;
}

}  // namespace

std::vector<BerRecord> run_experiment(const ExperimentConfig& cfg, int workers) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  std::vector<BerRecord> out;
  for (int c = 0; c < static_cast<int>(cfg.curves.size()); ++c)
    for (int s = 0; s < static_cast<int>(cfg.snr_db.size()); ++s)
      out.push_back(run_point(cfg, c, s, workers));
  return out;
}

// ---- output -----------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void refuse_existing(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path))
    throw std::runtime_error("output exists, pass force to overwrite: " + path);
}

}  // namespace

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records) {
  os << "detector,snr_db,bits,bit_errors,ber,ci_low,ci_high,seq_errors,seqs,ser\n";
  for (const auto& r : records) {
    os << r.detector << ',' << fmt_double(r.snr_db) << ',' << r.bits << ',' << r.bit_errors
       << ',' << fmt_double(r.ber) << ',' << fmt_double(r.ci_low) << ','
       << fmt_double(r.ci_high) << ',' << r.seq_errors << ',' << r.seqs << ','
       << fmt_double(r.ser) << '\n';
  }
}

void write_ber_csv_file(const std::string& path, const std::vector<BerRecord>& records,
                        bool force) {
  refuse_existing(path, force);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  write_ber_csv(os, records);
}

void write_dat_file(const std::string& path, const std::vector<BerRecord>& records,
                    bool force) {
  refuse_existing(path, force);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file: " + path);

  std::vector<std::string> labels;
  std::vector<double> snrs;
  for (const auto& r : records) {
    if (std::find(labels.begin(), labels.end(), r.detector) == labels.end())
      labels.push_back(r.detector);
    if (std::find(snrs.begin(), snrs.end(), r.snr_db) == snrs.end()) snrs.push_back(r.snr_db);
  }
  std::sort(snrs.begin(), snrs.end());

  os << "# snr_db";
  for (const auto& l : labels) os << ' ' << l;
  os << '\n';
  for (double s : snrs) {
    os << fmt_double(s);
    for (const auto& l : labels) {
      const BerRecord* found = nullptr;
      for (const auto& r : records)
        if (r.detector == l && r.snr_db == s) found = &r;
      os << ' ' << (found ? fmt_double(found->ber) : "nan");
    }
    os << '\n';
  }
}

// ---- theory sweep -----------------------------------------------------------

std::vector<TheoryRow> theory_sweep(const json& doc) {
  require_keys(doc, {"curves", "snr_db", "methods"}, "theory");
  std::vector<std::string> methods = {"spec"};
  if (doc.contains("methods")) methods = doc.at("methods").get<std::vector<std::string>>();
  const auto snrs = doc.at("snr_db").get<std::vector<double>>();
  if (snrs.empty()) throw std::invalid_argument("theory: snr grid must be non-empty");

  std::vector<TheoryRow> rows;
  for (const auto& jc : doc.at("curves")) {
    require_keys(jc, {"k", "mode", "n_branches"}, "theory.curve");
    TheoryRow base;
    base.k = jc.at("k").get<int>();
    base.mode = jc.value("mode", "ss");
    base.n_branches = jc.value("n_branches", 1);
    if (base.mode != "ss" && base.mode != "ds")
      throw std::invalid_argument("theory.curve.mode: 'ss' or 'ds'");
    if (base.mode == "ds" && base.n_branches != 1)
      throw std::invalid_argument("theory: multi-branch predictions cover single-sided only");
    const bool ds = base.mode == "ds";
    const int kd = ds ? base.k - 2 : base.k - 1;

    for (const auto& method : methods) {
      for (double db : snrs) {
        const SnrPoint snr = SnrPoint::from_db(db);
        TheoryRow row = base;
        row.snr_db = db;
        if (method == "spec") {
          row.pred = ds ? sep_ds_flat(base.k, snr)
                        : (base.n_branches > 1 ? sep_simo_flat(base.n_branches, base.k, snr)
                                               : sep_ss_flat(base.k, snr));
        } else if (method == "quadrature" || method == "quadrature-approx") {
          const QKind q = method == "quadrature" ? QKind::Exact : QKind::Approx;
          const double ps = ds ? sep_ds_flat_quadrature(base.k, snr, q)
                               : sep_simo_flat_quadrature(base.n_branches, base.k, snr, q);
          row.pred = ber_from_sep(ps, kd);
          row.pred.method = q == QKind::Exact ? SepMethod::Quadrature : SepMethod::QuadratureApprox;
        } else if (method == "pair-exact") {
          const double ps = ds ? sep_ds_flat_pair_exact(base.k, snr)
                               : sep_simo_flat_pair_exact(base.n_branches, base.k, snr);
          row.pred = ber_from_sep(ps, kd);
          row.pred.method = SepMethod::PairExact;
        } else {
          throw std::invalid_argument("theory: unknown method '" + method + "'");
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_theory_csv(std::ostream& os, const std::vector<TheoryRow>& rows) {
  os << "k,mode,n_branches,snr_db,p_s,p_b_mid,p_b_lower,p_b_upper,method\n";
  for (const auto& r : rows) {
    os << r.k << ',' << r.mode << ',' << r.n_branches << ',' << fmt_double(r.snr_db) << ','
       << fmt_double(r.pred.p_s) << ',' << fmt_double(r.pred.p_b_mid) << ','
       << fmt_double(r.pred.p_b_lower) << ',' << fmt_double(r.pred.p_b_upper) << ','
       << to_string(r.pred.method) << '\n';
  }
}

}  // namespace d3ofdm
