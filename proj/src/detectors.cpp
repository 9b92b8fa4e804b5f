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

#include "d3ofdm/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d3ofdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Candidate symbol values per position: the full constellation, or the single
// anchored value.
struct Window {
  std::vector<std::vector<std::complex<double>>> cand;
  std::vector<int> data_positions;  // positions with a free (full) candidate set
  int length = 0;
};

Window make_window(int length, const Anchors& anchors, const Constellation& c) {
  if (length < 2) throw std::invalid_argument("d3: window needs at least two cells");
  Window w;
  w.length = length;
  w.cand.assign(static_cast<std::size_t>(length), c.points());
  std::vector<bool> anchored(static_cast<std::size_t>(length), false);
  for (const auto& [pos, val] : anchors) {
    if (pos < 0 || pos >= length) throw std::invalid_argument("d3: anchor out of window");
    if (val == std::complex<double>{0.0, 0.0})
      throw std::invalid_argument("d3: anchor value must be nonzero");
    w.cand[static_cast<std::size_t>(pos)] = {val};
    anchored[static_cast<std::size_t>(pos)] = true;
  }
  for (int p = 0; p < length; ++p)
    if (!anchored[static_cast<std::size_t>(p)]) w.data_positions.push_back(p);
  return w;
}

// Branch metric between candidate a at position c and candidate b at c+1,
// summed over receive branches. Constant-modulus alphabets drop the constant
// |r|^2 terms and keep the (negated) correlation term; the argmin over full
// sequences is unchanged. QAM keeps the full quotient difference.
struct BranchMetric {
  const std::vector<Eigen::ArrayXcd>* branches;
  bool cm;

  double operator()(int pos, std::complex<double> a, std::complex<double> b) const {
    double m = 0.0;
    if (cm) {
      const std::complex<double> uv = a * std::conj(b);
      for (const auto& r : *branches)
        m -= ((r[pos] * std::conj(r[pos + 1])) / uv).real();
    } else {
      for (const auto& r : *branches)
        m += std::norm(r[pos] / a - r[pos + 1] / b);
    }
    return m;
  }
};

void check_branches(const std::vector<Eigen::ArrayXcd>& branches) {
  if (branches.empty()) throw std::invalid_argument("d3: needs at least one receive branch");
  for (const auto& b : branches)
    if (b.size() != branches.front().size())
      throw std::invalid_argument("d3: branch length mismatch");
}

DetectionResult finalize(const std::vector<std::complex<double>>& seq, const Window& w,
                         const std::vector<Eigen::ArrayXcd>& branches,
                         const Constellation& c) {
  DetectionResult res;
  res.symbols.resize(static_cast<Eigen::Index>(w.data_positions.size()));
  for (std::size_t i = 0; i < w.data_positions.size(); ++i)
    res.symbols[static_cast<Eigen::Index>(i)] = seq[static_cast<std::size_t>(w.data_positions[i])];
  res.bits = demap_bits(res.symbols, c);
  Eigen::ArrayXcd full(w.length);
  for (int p = 0; p < w.length; ++p) full[p] = seq[static_cast<std::size_t>(p)];
  res.metric = 0.0;
  for (const auto& r : branches) res.metric += d3_objective(full, r);
  return res;
}

}  // namespace

Anchors anchors_of(const SegmentLayout& layout) {
  Anchors a;
  for (int p : layout.pilot_positions()) a.emplace_back(p, layout.pilot_value);
  return a;
}

double d3_objective(const Eigen::ArrayXcd& trial, const Eigen::ArrayXcd& r) {
  if (trial.size() != r.size()) throw std::invalid_argument("d3_objective: length mismatch");
  if (trial.size() < 2) throw std::invalid_argument("d3_objective: window needs >= 2 cells");
  double j = 0.0;
  for (Eigen::Index v = 0; v + 1 < trial.size(); ++v) {
    if (trial[v] == std::complex<double>{0.0, 0.0} ||
        trial[v + 1] == std::complex<double>{0.0, 0.0})
      throw std::invalid_argument("d3_objective: zero trial symbol");
    j += std::norm(r[v] / trial[v] - r[v + 1] / trial[v + 1]);
  }
  return j;
}

double d3_objective_2d(const Eigen::ArrayXXcd& trial, const Eigen::ArrayXXcd& received) {
  if (trial.rows() != received.rows() || trial.cols() != received.cols())
    throw std::invalid_argument("d3_objective_2d: shape mismatch");
  for (Eigen::Index i = 0; i < trial.size(); ++i)
    if (trial(i) == std::complex<double>{0.0, 0.0})
      throw std::invalid_argument("d3_objective_2d: zero trial symbol");
  const auto q = (received / trial).eval();
  double j = 0.0;
  for (Eigen::Index l = 0; l < q.rows(); ++l)          // frequency-adjacent, per time row
    for (Eigen::Index v = 0; v + 1 < q.cols(); ++v)
      j += std::norm(q(l, v) - q(l, v + 1));
  for (Eigen::Index v = 0; v < q.cols(); ++v)          // time-adjacent, per frequency column
    for (Eigen::Index l = 0; l + 1 < q.rows(); ++l)
      j += std::norm(q(l, v) - q(l + 1, v));
  return j;
}

DetectionResult d3_bruteforce_anchored(const std::vector<Eigen::ArrayXcd>& branches,
                                       const Anchors& anchors, const Constellation& c,
                                       const DetectorOptions& opt) {
  check_branches(branches);
  const int len = static_cast<int>(branches.front().size());
  Window w = make_window(len, anchors, c);
  const int kd = static_cast<int>(w.data_positions.size());

  double trials = 1.0;
  for (int i = 0; i < kd; ++i) trials *= c.size();
  if (trials > static_cast<double>(opt.bruteforce_budget))
    throw std::invalid_argument("d3_bruteforce: trial count exceeds budget");

  const BranchMetric metric{&branches, c.constant_modulus()};

  std::vector<std::complex<double>> seq(static_cast<std::size_t>(len));
  for (const auto& [pos, val] : anchors) seq[static_cast<std::size_t>(pos)] = val;

  // Odometer over data positions; the first data position is the most
  // significant digit so the scan order is lexicographic in point indices and
  // "keep strictly better" realizes the lowest-index tie rule.
  std::vector<int> idx(static_cast<std::size_t>(kd), 0);
  std::vector<std::complex<double>> best_seq;
  double best = kInf;
  while (true) {
    for (int i = 0; i < kd; ++i)
      seq[static_cast<std::size_t>(w.data_positions[static_cast<std::size_t>(i)])] =
          c.point(idx[static_cast<std::size_t>(i)]);
    double m = 0.0;
    for (int p = 0; p + 1 < len; ++p)
      m += metric(p, seq[static_cast<std::size_t>(p)], seq[static_cast<std::size_t>(p + 1)]);
    if (m < best) {
      best = m;
      best_seq = seq;
    }
    int d = kd - 1;
    for (; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < c.size()) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d < 0) break;
  }
  return finalize(best_seq, w, branches, c);
}

DetectionResult d3_viterbi_anchored(const std::vector<Eigen::ArrayXcd>& branches,
                                    const Anchors& anchors, const Constellation& c) {
  check_branches(branches);
  const int len = static_cast<int>(branches.front().size());
  Window w = make_window(len, anchors, c);
  const BranchMetric metric{&branches, c.constant_modulus()};

  // Forward pass with add-compare-select over per-position candidate sets;
  // anchored positions collapse to a single state.
  std::vector<double> pm(w.cand[0].size(), 0.0);
  std::vector<std::vector<int>> back(static_cast<std::size_t>(len));
  for (int pos = 1; pos < len; ++pos) {
    const auto& prev = w.cand[static_cast<std::size_t>(pos - 1)];
    const auto& cur = w.cand[static_cast<std::size_t>(pos)];
    std::vector<double> npm(cur.size(), kInf);
    std::vector<int> bp(cur.size(), 0);
    for (std::size_t sn = 0; sn < cur.size(); ++sn) {
      for (std::size_t sp = 0; sp < prev.size(); ++sp) {
        const double m = pm[sp] + metric(pos - 1, prev[sp], cur[sn]);
        if (m < npm[sn]) {
          npm[sn] = m;
          bp[sn] = static_cast<int>(sp);
        }
      }
    }
    pm = std::move(npm);
    back[static_cast<std::size_t>(pos)] = std::move(bp);
  }

  int state = static_cast<int>(std::min_element(pm.begin(), pm.end()) - pm.begin());
  std::vector<std::complex<double>> seq(static_cast<std::size_t>(len));
  for (int pos = len - 1; pos >= 0; --pos) {
    seq[static_cast<std::size_t>(pos)] = w.cand[static_cast<std::size_t>(pos)][static_cast<std::size_t>(state)];
    if (pos > 0) state = back[static_cast<std::size_t>(pos)][static_cast<std::size_t>(state)];
  }
  return finalize(seq, w, branches, c);
}

DetectionResult d3_bruteforce(const Eigen::ArrayXcd& r, const SegmentLayout& layout,
                              const Constellation& c, const DetectorOptions& opt) {
  if (r.size() < layout.k) throw std::invalid_argument("d3_bruteforce: segment too short");
  return d3_bruteforce_anchored({r}, anchors_of(layout), c, opt);
}

DetectionResult d3_viterbi(const Eigen::ArrayXcd& r, const SegmentLayout& layout,
                           const Constellation& c) {
  if (r.size() < layout.k) throw std::invalid_argument("d3_viterbi: segment too short");
  return d3_viterbi_anchored({r}, anchors_of(layout), c);
}

DetectionResult d3_simo(const std::vector<Eigen::ArrayXcd>& branches,
                        const SegmentLayout& layout, const Constellation& c,
                        const DetectorOptions& opt) {
  check_branches(branches);
  const long long kd = layout.data_count();
  double trials = 1.0;
  for (long long i = 0; i < kd; ++i) trials *= c.size();
  if (trials <= static_cast<double>(opt.bruteforce_budget) && kd <= 12)
    return d3_bruteforce_anchored(branches, anchors_of(layout), c, opt);
  return d3_viterbi_anchored(branches, anchors_of(layout), c);
}

DetectionResult d3_coded(const Eigen::ArrayXcd& r,
                         const std::vector<Eigen::ArrayXcd>& codebook,
                         const Constellation& c, const DetectorOptions& opt) {
  if (codebook.empty()) throw std::invalid_argument("d3_coded: empty codebook");
  if (static_cast<long long>(codebook.size()) > opt.bruteforce_budget)
    throw std::invalid_argument("d3_coded: codebook exceeds budget");
  double best = kInf;
  const Eigen::ArrayXcd* win = nullptr;
  for (const auto& u : codebook) {
    if (u.size() != r.size()) throw std::invalid_argument("d3_coded: codeword length mismatch");
    const double j = d3_objective(u, r);
    if (j < best) {
      best = j;
      win = &u;
    }
  }
  DetectionResult res;
  res.symbols = *win;
  res.bits = demap_bits(res.symbols, c);
  res.metric = best;
  return res;
}

Eigen::ArrayXXcd detect_resource_block(const Eigen::ArrayXXcd& received,
                                       const RbLayout& layout, const Constellation& c) {
  layout.validate();
  if (received.rows() != layout.rows || received.cols() != layout.cols)
    throw std::invalid_argument("detect_resource_block: grid shape mismatch");

  Eigen::ArrayXXcd decided(layout.rows, layout.cols);
  const auto prows = layout.pilot_rows();

  // Step 1: pilot-bearing rows, detected along time.
  for (int pr : prows) {
    Anchors anchors;
    for (const auto& [rr, cc] : layout.pilot_cells)
      if (rr == pr) anchors.emplace_back(cc, layout.pilot_value);
    const Eigen::ArrayXcd row = received.row(pr).transpose();
    DetectionResult det = d3_viterbi_anchored({row}, anchors, c);
    Eigen::Index di = 0;
    std::vector<bool> is_anchor(static_cast<std::size_t>(layout.cols), false);
    for (const auto& [pos, val] : anchors) is_anchor[static_cast<std::size_t>(pos)] = true;
    for (int col = 0; col < layout.cols; ++col)
      decided(pr, col) = is_anchor[static_cast<std::size_t>(col)] ? layout.pilot_value
                                                                  : det.symbols[di++];
  }

  // Step 2: every column along frequency, anchored on step-one decisions.
  for (int col = 0; col < layout.cols; ++col) {
    Anchors anchors;
    for (int pr : prows) anchors.emplace_back(pr, decided(pr, col));
    const Eigen::ArrayXcd colv = received.col(col);
    DetectionResult det = d3_viterbi_anchored({colv}, anchors, c);
    Eigen::Index di = 0;
    std::vector<bool> is_anchor(static_cast<std::size_t>(layout.rows), false);
    for (const auto& [pos, val] : anchors) is_anchor[static_cast<std::size_t>(pos)] = true;
    for (int row = 0; row < layout.rows; ++row)
      if (!is_anchor[static_cast<std::size_t>(row)]) decided(row, col) = det.symbols[di++];
  }
  return decided;
}

CoherentResult coherent_mld(const std::vector<Eigen::ArrayXcd>& branches,
                            const std::vector<Eigen::ArrayXcd>& gains,
                            const Constellation& c) {
  if (branches.empty() || branches.size() != gains.size())
    throw std::invalid_argument("coherent_mld: branch/gain mismatch");
  const Eigen::Index n = branches.front().size();
  for (std::size_t b = 0; b < branches.size(); ++b)
    if (branches[b].size() != n || gains[b].size() != n)
      throw std::invalid_argument("coherent_mld: length mismatch");

  CoherentResult res;
  res.symbols.resize(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    double gain2 = 0.0;
    for (const auto& h : gains) gain2 += std::norm(h[v]);
    if (gain2 == 0.0) ++res.degenerate_bins;
    int best = 0;
    double best_m = kInf;
    for (int i = 0; i < c.size(); ++i) {
      double m = 0.0;
      for (std::size_t b = 0; b < branches.size(); ++b)
        m += std::norm(branches[b][v] - gains[b][v] * c.point(i));
      if (m < best_m) {
        best_m = m;
        best = i;
      }
    }
    res.symbols[v] = c.point(best);
  }
  res.bits = demap_bits(res.symbols, c);
  return res;
}

namespace {

// Natural cubic spline through (x_i, y_i); evaluated with boundary-cubic
// extrapolation outside the pilot span.
class NaturalSpline {
 public:
  NaturalSpline(const std::vector<double>& x, const std::vector<double>& y) : x_(x), y_(y) {
    const std::size_t n = x.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), cc(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      cc[i] = h1 / 6.0;
      d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // Thomas solve on the interior unknowns (natural ends: m_0 = m_{n-1} = 0).
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * cc[i - 1];
      d[i] -= w * d[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (d[i] - (i + 2 < n ? cc[i] * m_[i + 1] : 0.0)) / b[i];
      if (i == 1) break;
    }
  }

  double eval(double t) const {
    const std::size_t n = x_.size();
    if (n == 1) return y_[0];
    std::size_t i = 0;
    if (t >= x_[n - 2])
      i = n - 2;
    else
      while (i + 2 < n && t > x_[i + 1]) ++i;
    const double h = x_[i + 1] - x_[i];
    const double u = (x_[i + 1] - t) / h;
    const double v = (t - x_[i]) / h;
    return u * y_[i] + v * y_[i + 1] +
           ((u * u * u - u) * m_[i] + (v * v * v - v) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_;
  std::vector<double> m_;  // second derivatives
};

}  // namespace

CsiEstimate ls_estimate_interpolate(const Eigen::ArrayXcd& r,
                                    const std::vector<int>& pilot_positions,
                                    const Eigen::ArrayXcd& pilot_values, int n,
                                    InterpKind kind) {
  if (pilot_positions.empty())
    throw std::invalid_argument("ls_estimate_interpolate: needs at least one pilot");
  if (static_cast<Eigen::Index>(pilot_positions.size()) != pilot_values.size())
    throw std::invalid_argument("ls_estimate_interpolate: positions/values mismatch");

  const std::size_t np = pilot_positions.size();
  std::vector<double> px(np), pre(np), pim(np);
  for (std::size_t i = 0; i < np; ++i) {
    const int pos = pilot_positions[i];
    if (pos < 0 || pos >= n) throw std::invalid_argument("ls_estimate_interpolate: pilot out of range");
    const std::complex<double> ls = r[pos] * std::conj(pilot_values[static_cast<Eigen::Index>(i)]) /
                                    std::norm(pilot_values[static_cast<Eigen::Index>(i)]);
    px[i] = pos;
    pre[i] = ls.real();
    pim[i] = ls.imag();
  }

  CsiEstimate est;
  est.kind = kind;
  est.h_hat.resize(n);

  if (np == 1) {
    est.h_hat.setConstant(std::complex<double>{pre[0], pim[0]});
    return est;
  }

  if (kind == InterpKind::Linear) {
    for (int v = 0; v < n; ++v) {
      std::size_t i = 0;
      if (v >= px[np - 2])
        i = np - 2;
      else
        while (i + 2 < np && v > px[i + 1]) ++i;
      const double t = (v - px[i]) / (px[i + 1] - px[i]);
      est.h_hat[v] = {pre[i] + t * (pre[i + 1] - pre[i]), pim[i] + t * (pim[i + 1] - pim[i])};
    }
  } else {
    const NaturalSpline sre(px, pre), sim(px, pim);
    for (int v = 0; v < n; ++v) est.h_hat[v] = {sre.eval(v), sim.eval(v)};
  }
  return est;
}

CsiEstimate ls_estimate_interpolate(const Eigen::ArrayXcd& r, const FrameLayout& frame,
                                    InterpKind kind) {
  Eigen::ArrayXcd vals(static_cast<Eigen::Index>(frame.pilots.size()));
  vals.setConstant(frame.base.pilot_value);
  return ls_estimate_interpolate(r, frame.pilots, vals,
                                 static_cast<int>(r.size()), kind);
}

ZfResult zf_equalize(const Eigen::ArrayXcd& r, const Eigen::ArrayXcd& h_hat) {
  if (r.size() != h_hat.size()) throw std::invalid_argument("zf_equalize: length mismatch");
  ZfResult res;
  res.equalized.resize(r.size());
  for (Eigen::Index v = 0; v < r.size(); ++v) {
    if (h_hat[v] == std::complex<double>{0.0, 0.0}) {
      res.erasure_bins.push_back(static_cast<int>(v));
      res.equalized[v] = {0.0, 0.0};
    } else {
      res.equalized[v] = r[v] / h_hat[v];
    }
  }
  return res;
}

DetectionResult glrt_mlsd(const std::vector<Eigen::ArrayXcd>& branches,
                          const SegmentLayout& layout, const Constellation& c,
                          const DetectorOptions& opt) {
  check_branches(branches);
  const int len = static_cast<int>(branches.front().size());
  if (len < layout.k) throw std::invalid_argument("glrt_mlsd: segment too short");
  Window w = make_window(len, anchors_of(layout), c);
  const int kd = static_cast<int>(w.data_positions.size());

  double trials = 1.0;
  for (int i = 0; i < kd; ++i) trials *= c.size();
  if (trials > static_cast<double>(opt.bruteforce_budget))
    throw std::invalid_argument("glrt_mlsd: trial count exceeds budget");

  std::vector<std::complex<double>> seq(static_cast<std::size_t>(len));
  for (const auto& [pos, val] : anchors_of(layout)) seq[static_cast<std::size_t>(pos)] = val;

  std::vector<int> idx(static_cast<std::size_t>(kd), 0);
  std::vector<std::complex<double>> best_seq;
  double best = -kInf;
  while (true) {
    for (int i = 0; i < kd; ++i)
      seq[static_cast<std::size_t>(w.data_positions[static_cast<std::size_t>(i)])] =
          c.point(idx[static_cast<std::size_t>(i)]);
    double norm2 = 0.0;
    for (const auto& s : seq) norm2 += std::norm(s);
    double score = 0.0;
    for (const auto& r : branches) {
      std::complex<double> corr = 0.0;
      for (int p = 0; p < len; ++p) corr += std::conj(seq[static_cast<std::size_t>(p)]) * r[p];
      score += std::norm(corr);
    }
    score /= std::sqrt(norm2);
    if (score > best) {
      best = score;
      best_seq = seq;
    }
    int d = kd - 1;
    for (; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < c.size()) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d < 0) break;
  }

  DetectionResult res;
  res.symbols.resize(static_cast<Eigen::Index>(kd));
  for (int i = 0; i < kd; ++i)
    res.symbols[i] = best_seq[static_cast<std::size_t>(w.data_positions[static_cast<std::size_t>(i)])];
  res.bits = demap_bits(res.symbols, c);
  res.metric = best;
  return res;
}

}  // namespace d3ofdm
