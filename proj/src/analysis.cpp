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

#include "d3ofdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "d3ofdm/special.hpp"

namespace d3ofdm {

namespace {

constexpr double kPi = std::numbers::pi;

double q_of(double x, QKind q) {
  if (q == QKind::Exact) return q_exact(x);
  return x >= 0.0 ? q_approx(x) : 1.0 - q_approx(-x);
}

double lgamma_ratio(int n_plus_m, int n) {
  // Gamma(n+m)/Gamma(n) for integer arguments.
  double r = 1.0;
  for (int i = n; i < n_plus_m; ++i) r *= i;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Piecewise adaptive integration with splits near the origin, where the
// fading-average integrands concentrate at high SNR.
double integrate_fading(const std::function<double(double)>& f, double scale,
                        double upper) {
  static constexpr double kTol = 1e-13;
  double total = 0.0;
  double edges[] = {0.0, scale, 10.0 * scale, 1.0, 5.0, upper};
  double prev = 0.0;
  for (double e : edges) {
    if (e <= prev) continue;
    if (e > upper) e = upper;
    total += integrate(f, prev, e, kTol);
    prev = e;
    if (prev >= upper) break;
  }
  return total;
}

// Gauss-Hermite rule (physicists' weight exp(-x^2)) from the Jacobi matrix.
struct HermiteRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

const HermiteRule& hermite_rule() {
  static const HermiteRule rule = [] {
    constexpr int n = 40;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double off = std::sqrt(i / 2.0);
      jacobi(i, i - 1) = off;
      jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    HermiteRule r;
    r.nodes = es.eigenvalues().array();
    r.weights = std::sqrt(kPi) * es.eigenvectors().row(0).array().square();
    return r;
  }();
  return rule;
}

// Exact flip probability of Re{X conj(Y)} for independent complex Gaussians
// X ~ (mu_x real, var_x per component), Y ~ (mu_y real, var_y per component),
// by Gauss-Hermite integration over Y of the conditional Gaussian tail.
double flip_re_xy(double mu_x, double var_x, double mu_y, double var_y) {
  const auto& gh = hermite_rule();
  const double sy = std::sqrt(2.0 * var_y);  // GH change of variables
  const double sx = std::sqrt(var_x);
  double p = 0.0;
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
    const double yi = mu_y + sy * gh.nodes[i];
    for (Eigen::Index j = 0; j < gh.nodes.size(); ++j) {
      const double yq = sy * gh.nodes[j];
      const double mean = mu_x * yi;
      const double sd = sx * std::hypot(yi, yq);
      p += gh.weights[i] * gh.weights[j] * q_exact(mean / sd);
    }
  }
  return p / kPi;
}

}  // namespace

SnrPoint SnrPoint::from_db(double db) {
  SnrPoint s;
  s.db = db;
  s.gamma_bar = std::pow(10.0, db / 10.0);
  return s;
}

SnrPoint SnrPoint::from_linear(double gamma_bar) {
  if (!(gamma_bar > 0.0)) throw std::invalid_argument("SnrPoint: gamma must be positive");
  SnrPoint s;
  s.gamma_bar = gamma_bar;
  s.db = 10.0 * std::log10(gamma_bar);
  return s;
}

std::string_view to_string(SepMethod m) {
  switch (m) {
    case SepMethod::ClosedForm: return "closed-form";
    case SepMethod::Quadrature: return "quadrature";
    case SepMethod::QuadratureApprox: return "quadrature-approx";
    default: return "pair-exact";
  }
}

SepPrediction ber_from_sep(double p_s, int k_d) {
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw std::invalid_argument("ber_from_sep: p_s outside [0,1]");
  if (k_d < 1) throw std::invalid_argument("ber_from_sep: k_d must be >= 1");
  SepPrediction p;
  p.p_s = p_s;
  p.p_b_lower = p_s / k_d;
  p.p_b_upper = p_s;
  p.p_b_mid = p_s / (0.5 * (1.0 + k_d));
  return p;
}

PairStats PairStats::of(std::complex<double> h_v, std::complex<double> h_next,
                        double sigma_w_sq) {
  PairStats ps;
  ps.mu_sp = (h_v * std::conj(h_next)).real();
  ps.sigma_sp_sq = sigma_w_sq * (std::norm(h_v) + std::norm(h_next) + sigma_w_sq);
  return ps;
}

double pair_flip_gaussian(const PairStats& ps, QKind q) {
  if (!(ps.sigma_sp_sq > 0.0))
    throw std::invalid_argument("pair_flip_gaussian: needs positive variance");
  const double a2 = 2.0 * std::fabs(ps.mu_sp) / ps.sigma_sp_sq;
  const double x = std::sqrt(a2);
  return ps.mu_sp >= 0.0 ? q_of(x, q) : 1.0 - q_of(x, q);
}

double sep_conditional(const Eigen::ArrayXcd& h, double sigma_w_sq,
                       const SegmentLayout& layout, QKind q) {
  if (h.size() != layout.k) throw std::invalid_argument("sep_conditional: |H| != k");
  if (!(sigma_w_sq > 0.0)) throw std::invalid_argument("sep_conditional: sigma_w^2 must be > 0");
  const int k = layout.k;

  if (layout.mode == SegmentLayout::Mode::SS) {
    double pc = 1.0;
    for (int v = 0; v + 1 < k; ++v)
      pc *= 1.0 - pair_flip_gaussian(PairStats::of(h[v], h[v + 1], sigma_w_sq), q);
    return 1.0 - pc;
  }

  // Double-sided: the two pilot-adjacent pairs pool into one decision
  // variable; its argument gains the published sqrt(2) boost.
  const PairStats first = PairStats::of(h[0], h[1], sigma_w_sq);
  const PairStats last = PairStats::of(h[k - 2], h[k - 1], sigma_w_sq);
  PairStats edge;
  edge.mu_sp = 0.5 * (first.mu_sp + last.mu_sp);
  edge.sigma_sp_sq = 0.5 * (first.sigma_sp_sq + last.sigma_sp_sq);
  const double a2 = 2.0 * std::numbers::sqrt2 * std::fabs(edge.mu_sp) / edge.sigma_sp_sq;
  const double edge_flip =
      edge.mu_sp >= 0.0 ? q_of(std::sqrt(a2), q) : 1.0 - q_of(std::sqrt(a2), q);

  double pc = 1.0 - edge_flip;
  for (int v = 1; v + 2 < k; ++v)
    pc *= 1.0 - pair_flip_gaussian(PairStats::of(h[v], h[v + 1], sigma_w_sq), q);
  return 1.0 - pc;
}

// ---- closed forms -----------------------------------------------------------

double closed_form_ss_k2(double g) { return 1.0 / (2.0 * (g + 1.0)); }

double closed_form_ss_k3(double g) {
  const double z = (1.0 / (2.0 * g)) * (1.0 / g + 1.0);
  return (z / kPi) * exp_integral_e1(z + 1.0) * std::exp(z + 1.0);
}

double closed_form_ss_k7(double g) {
  const double z = (1.0 / (2.0 * g)) * (1.0 / (4.0 * g) + 1.0);
  const double bracket = std::exp(z + 3.0) * (2.0 * z + 6.0) * (2.0 * z + 6.0) *
                             exp_integral_e1(z + 3.0) -
                         4.0 * (z + 1.0);
  return z / (64.0 * kPi * kPi * kPi) * bracket;
}

double closed_form_ds_k3(double g) {
  const double y = std::sqrt(8.0 * g + std::numbers::sqrt2 * (4.0 + 1.0 / g));
  return (y / 2.0 - std::numbers::sqrt2) / y;
}

double closed_form_ds_k4(double g) {
  const double o1 = 1.0 + (std::numbers::sqrt2 / (4.0 * g)) * (1.0 + 1.0 / (4.0 * g));
  return 1.0 / (8.0 * kPi * g) * (o1 - 1.0) * std::exp(o1) * exp_integral_e1(o1);
}

double closed_form_ds_k6(double g) {
  const double o1 = 1.0 + (std::numbers::sqrt2 / (4.0 * g)) * (1.0 + 1.0 / (4.0 * g));
  const double o2 = 2.0 + (std::numbers::sqrt2 / g) * (8.0 + 1.0 / (32.0 * g));
  return (o1 - 1.0) / (4.0 * kPi * kPi) *
         (1.0 - ((o1 - 1.0) * std::exp(o2) + 2.0) * exp_integral_e1(o2));
}

double closed_form_simo_n2_k2(double g) {
  const double kap = std::sqrt(2.0 + g);
  return 0.5 +
         q_exact(kap / std::sqrt(g)) *
             (2.0 * g * (g / std::numbers::sqrt2 + 2.0) - std::exp(kap * kap)) -
         g * kap / std::sqrt(2.0 * kPi);
}

// ---- quadrature routes ------------------------------------------------------

namespace {

// Product-model argument of one pair conditioned on the flat-fading power t.
double flat_arg(double t, double s2) { return std::sqrt(t / (s2 * (t + s2))); }

}  // namespace

double sep_ss_flat_quadrature(int k, SnrPoint snr, QKind q) {
  if (k < 2) throw std::invalid_argument("sep_ss_flat_quadrature: k >= 2");
  const double s2 = snr.sigma_w_sq();
  auto integrand = [&](double t) {
    const double flip = q_of(flat_arg(t, s2), q);
    return (1.0 - std::pow(1.0 - flip, k - 1)) * std::exp(-t);
  };
  return integrate_fading(integrand, s2, 32.0 * k);
}

double sep_ds_flat_quadrature(int k, SnrPoint snr, QKind q) {
  if (k < 3) throw std::invalid_argument("sep_ds_flat_quadrature: k >= 3");
  const double s2 = snr.sigma_w_sq();
  const double boost = std::sqrt(std::numbers::sqrt2);
  auto integrand = [&](double t) {
    const double x = flat_arg(t, s2);
    const double pe = q_of(boost * x, q);
    const double pi_ = q_of(x, q);
    return (1.0 - (1.0 - pe) * std::pow(1.0 - pi_, k - 3)) * std::exp(-t);
  };
  return integrate_fading(integrand, s2, 32.0 * k);
}

double sep_simo_flat_quadrature(int n_branches, int k, SnrPoint snr, QKind q) {
  if (n_branches < 1) throw std::invalid_argument("sep_simo_flat_quadrature: n >= 1");
  if (k < 2) throw std::invalid_argument("sep_simo_flat_quadrature: k >= 2");
  const double s2 = snr.sigma_w_sq();
  const int n = n_branches;
  const double lg = std::lgamma(static_cast<double>(n));
  auto integrand = [&](double a) {
    const double x = std::sqrt(a / (s2 * (n * s2 + a)));
    const double flip = q_of(x, q);
    const double dens = n == 1 ? std::exp(-a) : std::exp((n - 1) * std::log(a) - a - lg);
    return (1.0 - std::pow(1.0 - flip, k - 1)) * dens;
  };
  return integrate_fading(integrand, s2, 32.0 * k + 8.0 * n);
}

// ---- exact pair-statistics routes -------------------------------------------

double sep_ss_flat_pair_exact(int k, SnrPoint snr) {
  if (k < 2) throw std::invalid_argument("sep_ss_flat_pair_exact: k >= 2");
  // P_S = 1 - E[(1 - 0.5 e^{-g t})^{K-1}], t ~ Exp(1).
  const double g = snr.gamma_bar;
  double s = 0.0;
  for (int j = 0; j < k; ++j)
    s += binom(k - 1, j) * std::pow(-0.5, j) / (1.0 + j * g);
  return 1.0 - s;
}

double sep_ds_flat_pair_exact(int k, SnrPoint snr) {
  if (k < 3) throw std::invalid_argument("sep_ds_flat_pair_exact: k >= 3");
  const double g = snr.gamma_bar;
  const double s2 = snr.sigma_w_sq();

  if (k == 3) {
    // Single pooled variable Re{(r_0 + r_2) conj(r_1)} with a shared centre
    // observation; integrate its exact conditional flip over the fading power.
    auto integrand = [&](double t) {
      const double al = std::sqrt(t);
      return flip_re_xy(2.0 * al, 2.0 * s2, al, s2) * std::exp(-t);
    };
    return integrate_fading(integrand, s2, 40.0);
  }

  // K >= 4: the pooled edge couples two disjoint pairs (second-order
  // diversity), interior pairs are plain differential decisions. With
  // gt = t / s2 = 2 g t:
  //   p_edge(t) = (1/8) e^{-2 g t} (4 + 2 g t),  p_int(t) = (1/2) e^{-g t}.
  // Expanding (1 - p_int)^{K-3} (1 - p_edge) termwise against E[t^m e^{-s t}]
  // gives a finite closed sum.
  double expect = 0.0;
  for (int j = 0; j <= k - 3; ++j) {
    const double cj = binom(k - 3, j) * std::pow(-0.5, j);
    const double s_int = j * g;
    expect += cj / (1.0 + s_int);
    const double s_all = s_int + 2.0 * g;
    // - p_edge contribution: (1/8)(4 E[e^{-s t}] + 2 g E[t e^{-s t}]).
    expect -= cj * (0.5 / (1.0 + s_all) + 0.25 * g / ((1.0 + s_all) * (1.0 + s_all)));
  }
  return 1.0 - expect;
}

double sep_simo_flat_pair_exact(int n_branches, int k, SnrPoint snr) {
  const int n = n_branches;
  if (n < 1 || n > 16) throw std::invalid_argument("sep_simo_flat_pair_exact: n in [1,16]");
  if (k < 2 || k > 24) throw std::invalid_argument("sep_simo_flat_pair_exact: k in [2,24]");
  const double g = snr.gamma_bar;

  // Branch-summed pair decision = N-fold post-detection diversity combining:
  //   p(gt) = 2^{1-2N} e^{-gt} sum_{m<N} b_m gt^m,  gt = g a,  a ~ Gamma(N,1).
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int kk = 0; kk <= n - 1 - m; ++kk) s += binom(2 * n - 1, kk);
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    b[static_cast<std::size_t>(m)] = s / fact;
  }
  const double c = std::pow(2.0, 1 - 2 * n);

  // E[(1-p)^{K-1}] termwise: powers of the polynomial by convolution, then
  // E[gt^m e^{-j gt}] = g^m Gamma(N+m)/Gamma(N) (1 + j g)^{-(N+m)}.
  double expect = 0.0;
  std::vector<double> poly{1.0};  // coefficients of (sum b_m gt^m)^j
  for (int j = 0; j < k; ++j) {
    if (j > 0) {
      std::vector<double> next(poly.size() + b.size() - 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t m = 0; m < b.size(); ++m) next[i + m] += poly[i] * b[m];
      poly = std::move(next);
    }
    const double cj = binom(k - 1, j) * std::pow(-c, j);
    double term = 0.0;
    for (std::size_t m = 0; m < poly.size(); ++m) {
      term += poly[m] * std::pow(g, static_cast<double>(m)) *
              lgamma_ratio(n + static_cast<int>(m), n) /
              std::pow(1.0 + j * g, n + static_cast<double>(m));
    }
    expect += cj * term;
  }
  return 1.0 - expect;
}

// ---- dispatching predictions ------------------------------------------------

SepPrediction sep_ss_flat(int k, SnrPoint snr) {
  if (k < 2) throw std::invalid_argument("sep_ss_flat: k >= 2");
  SepPrediction p;
  const double g = snr.gamma_bar;
  if (k == 2) {
    p = ber_from_sep(closed_form_ss_k2(g), k - 1);
    p.method = SepMethod::ClosedForm;
  } else if (k == 3) {
    p = ber_from_sep(std::clamp(closed_form_ss_k3(g), 0.0, 1.0), k - 1);
    p.method = SepMethod::ClosedForm;
  } else if (k == 7) {
    p = ber_from_sep(std::clamp(closed_form_ss_k7(g), 0.0, 1.0), k - 1);
    p.method = SepMethod::ClosedForm;
  } else {
    p = ber_from_sep(sep_ss_flat_quadrature(k, snr, QKind::Exact), k - 1);
    p.method = SepMethod::Quadrature;
  }
  return p;
}

SepPrediction sep_ds_flat(int k, SnrPoint snr) {
  if (k < 3) throw std::invalid_argument("sep_ds_flat: k >= 3");
  SepPrediction p;
  const double g = snr.gamma_bar;
  if (k == 3) {
    p = ber_from_sep(std::clamp(closed_form_ds_k3(g), 0.0, 1.0), 1);
    p.method = SepMethod::ClosedForm;
  } else if (k == 4) {
    p = ber_from_sep(std::clamp(closed_form_ds_k4(g), 0.0, 1.0), 2);
    p.method = SepMethod::ClosedForm;
  } else if (k == 6) {
    p = ber_from_sep(std::clamp(closed_form_ds_k6(g), 0.0, 1.0), 4);
    p.method = SepMethod::ClosedForm;
  } else {
    p = ber_from_sep(sep_ds_flat_quadrature(k, snr, QKind::Exact), k - 2);
    p.method = SepMethod::Quadrature;
  }
  return p;
}

SepPrediction sep_simo_flat(int n_branches, int k, SnrPoint snr) {
  if (n_branches < 1) throw std::invalid_argument("sep_simo_flat: n >= 1");
  if (k < 2) throw std::invalid_argument("sep_simo_flat: k >= 2");
  SepPrediction p;
  if (n_branches == 2 && k == 2) {
    // Published closed form, preserved verbatim; it leaves [0,1] for moderate
    // SNR (documented by the acceptance suite) so the clamp only keeps the
    // record well-formed.
    p = ber_from_sep(std::clamp(closed_form_simo_n2_k2(snr.gamma_bar), 0.0, 1.0), 1);
    p.method = SepMethod::ClosedForm;
  } else {
    p = ber_from_sep(sep_simo_flat_quadrature(n_branches, k, snr, QKind::Exact), k - 1);
    p.method = SepMethod::Quadrature;
  }
  return p;
}

}  // namespace d3ofdm
