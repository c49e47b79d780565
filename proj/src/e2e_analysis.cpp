// Copyright (C) 2026 The fsorf Authors
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

#include "fsorf/e2e_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fsorf/bigfloat.hpp"
#include "fsorf/specfun.hpp"

namespace fsorf::e2e {

namespace {

using specfun::BigFloat;

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// F1 + F2 - F1 F2 written so that small probabilities keep their relative accuracy.
double union_probability(double f1, double f2) { return clamp01(f1 + f2 * (1.0 - f1)); }

void check_rounds(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, const HarqConfig& harq) {
  harq.validate();
  if (sr.rounds() != harq.rounds_n1) throw std::invalid_argument("FSO series rounds differ from harq.rounds_n1");
  if (rd.rounds_n2 != harq.rounds_n2) throw std::invalid_argument("rf.rounds_n2 differs from harq.rounds_n2");
}

// Series whose verified range contains the normalized point x.
fso::GenPowerSeries covering(const fso::GenPowerSeries& sr, double x) {
  if (x <= sr.coverage()) return sr;
  fso::SeriesOptions wider = sr.options();
  wider.coverage = std::max(x, 2.0 * sr.coverage());
  return fso::build_series(sr.turbulence(), sr.pointing(), sr.detection_exponent(), sr.rounds(), sr.domain_scale(),
                           wider);
}

double gaussian_tail_sqrt2(double gamma) { return 0.5 * std::erfc(std::sqrt(gamma)); }

}  // namespace

void HarqConfig::validate() const {
  if (rounds_n1 < 1) throw std::invalid_argument("harq.rounds_n1 must be at least 1");
  if (rounds_n2 < 1) throw std::invalid_argument("harq.rounds_n2 must be at least 1");
  if (!(rate_bpshz > 0.0) || !std::isfinite(rate_bpshz)) throw std::invalid_argument("harq.rate must be positive");
}

double HarqConfig::snr_threshold() const { return std::expm1(rate_bpshz * std::numbers::ln2); }

void PerConfig::validate() const {
  if (packet_bits < 1) throw std::invalid_argument("per.packet_bits must be at least 1");
  if (std::isnan(t0_cache) || t0_cache < 0.0) throw std::invalid_argument("per.t0 must be positive");
}

double PerConfig::t0() const {
  validate();
  return t0_cache > 0.0 ? t0_cache : waterfall_threshold(*this);
}

DualHop make_dual_hop(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg, const HarqConfig& harq,
                      const fso::SeriesOptions& opts) {
  harq.validate();
  fso_cfg.validate();
  rf::RfLinkConfig rd = rf_cfg;
  rd.rounds_n2 = harq.rounds_n2;
  rd.validate();
  return DualHop{fso::build_series(fso_cfg.turb, fso_cfg.point, fso_cfg.r(), harq.rounds_n1,
                                   fso_cfg.effective_mean_snr(), opts),
                 rd};
}

double equivalent_cdf(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, double gamma) {
  if (std::isnan(gamma) || gamma < 0.0) throw std::domain_error("equivalent_cdf: gamma must be nonnegative");
  return union_probability(sr.cdf(gamma), rf::zrd_cdf(rd, gamma));
}

double equivalent_pdf(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("equivalent_pdf: gamma must be positive");
  const rf::ZrdValue z = rf::zrd_accumulated(rd, gamma);
  const double f1 = sr.pdf(gamma);
  const double c1 = sr.cdf(gamma);
  return std::max(0.0, f1 * (1.0 - z.cdf) + z.pdf * (1.0 - c1));
}

double outage_probability(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, const HarqConfig& harq,
                          double truncation_tol) {
  check_rounds(sr, rd, harq);
  if (sr.tail_bound() > truncation_tol) {
    throw TruncationError("outage_probability: series truncation bound above tolerance", sr.tail_bound());
  }
  return equivalent_cdf(sr, rd, harq.snr_threshold());
}

double packet_error(double gamma, int packet_bits) {
  if (packet_bits < 1) throw std::invalid_argument("packet_error: packet_bits must be at least 1");
  if (!(gamma >= 0.0)) return 1.0;
  const double pb = gaussian_tail_sqrt2(gamma);
  return -std::expm1(static_cast<double>(packet_bits) * std::log1p(-pb));
}

double waterfall_threshold(const PerConfig& per, QuadratureRule rule) {
  if (per.packet_bits < 1) throw std::invalid_argument("per.packet_bits must be at least 1");
  // int_G^inf g <= L int_G^inf Q(sqrt(2t)) dt <= L e^-G / 2.
  const double upper = std::log(0.5 * per.packet_bits) + 12.0 * std::numbers::ln10 + 1.0;
  auto g = [&](double t) { return packet_error(t, per.packet_bits); };
  double value = 0.0;
  double error = 0.0;
  if (rule == QuadratureRule::TanhSinh) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double l1 = 0.0;
    value = ts.integrate(g, 0.0, upper, 1e-14, &error, &l1);
  } else {
    // t = u^2 removes the square-root behaviour of g at the origin.
    auto gu = [&](double u) { return 2.0 * u * g(u * u); };
    value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(gu, 0.0, std::sqrt(upper), 25, 1e-14, &error);
  }
  if (!(error <= 1e-11 * value)) throw std::runtime_error("waterfall_threshold: quadrature did not converge");
  return value;
}

double per_closed_form(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, const PerConfig& per) {
  const double t0 = per.t0();
  return union_probability(sr.cdf(t0), rf::zrd_cdf(rd, t0));
}

PerTerms per_terms(const fso::GenPowerSeries& sr_in, const rf::RfLinkConfig& rd, double t0, J3Argument j3_arg) {
  if (!(t0 > 0.0)) throw std::domain_error("per_terms: t0 must be positive");
  const fso::GenPowerSeries sr = covering(sr_in, t0 / sr_in.domain_scale());
  const rf::NakagamiFit fit = rf::fit_nakagami(rd.irs);
  const double s = fit.m_shape * rd.rounds_n2;
  const double c = fit.m_shape / rd.mean_snr();
  const double ct = c * t0;
  const double mean_sr = sr.domain_scale();
  const double log_ratio = std::log(t0 / mean_sr);
  const double lg_s = std::lgamma(s);
  const double sign = j3_arg == J3Argument::Negative ? -1.0 : 1.0;
  const long bits = sr.precision_bits();
  const int r = sr.detection_exponent();

  BigFloat j1(0.0, bits), j3(0.0, bits), j4(0.0, bits);
  for (const fso::SeriesBranch& branch : sr.branches()) {
    for (std::size_t n = 0; n < branch.cdf_coeffs.size(); ++n) {
      const BigFloat& w = branch.cdf_coeffs[n];
      if (w.is_zero()) continue;
      const double eps = branch.offset + static_cast<double>(n) / r;
      const BigFloat eps_big = branch.exact_offset + static_cast<double>(n) / r;

      j1 += w * specfun::exp(eps_big * log_ratio);

      // int_0^T0 eps x^(eps-1) / mean^eps P(s, c x) dx
      const double lead3 = std::log(eps) + eps * log_ratio + s * std::log(ct) - std::lgamma(s + 1.0) -
                           std::log(eps + s);
      const double f22 = specfun::hyp2f2(s, eps + s, s + 1.0, eps + s + 1.0, sign * ct);
      j3 += w * (std::exp(lead3) * f22);

      // int_0^T0 (x / mean)^eps f_RD(x) dx
      const double lead4 = std::lgamma(eps + s) - lg_s - eps * std::log(c * mean_sr);
      j4 += w * (std::exp(lead4) * specfun::reg_lower_gamma(eps + s, ct));
    }
  }
  return PerTerms{j1.to_double(), rf::zrd_cdf(rd, t0), j3.to_double(), j4.to_double()};
}

double diversity_gain(const fso::FsoLinkConfig& fso_cfg, const HarqConfig& harq) {
  fso_cfg.validate();
  harq.validate();
  const double lead = std::min({fso_cfg.point.xi2, fso_cfg.turb.a, fso_cfg.turb.b});
  return harq.rounds_n1 * lead / fso_cfg.r();
}

double asymptotic_op(const fso::FsoLinkConfig& fso_cfg, const HarqConfig& harq) {
  fso_cfg.validate();
  harq.validate();
  const fso::GenPowerSeries sr = fso::build_series(fso_cfg.turb, fso_cfg.point, fso_cfg.r(), harq.rounds_n1,
                                                   fso_cfg.effective_mean_snr());
  return sr.leading_cdf(harq.snr_threshold() / sr.domain_scale());
}

E2eResult evaluate(const DualHop& hops, const HarqConfig& harq, const PerConfig& per) {
  check_rounds(hops.sr, hops.rd, harq);
  E2eResult out;
  const double th = harq.snr_threshold();
  out.po_sr = clamp01(hops.sr.cdf(th));
  out.po_rd = clamp01(rf::zrd_cdf(hops.rd, th));
  out.op = outage_probability(hops.sr, hops.rd, harq);
  const double t0 = per.t0();
  out.f_sr_t0 = clamp01(hops.sr.cdf(t0));
  out.f_rd_t0 = clamp01(rf::zrd_cdf(hops.rd, t0));
  out.per = union_probability(out.f_sr_t0, out.f_rd_t0);
  const double lead = std::min({hops.sr.pointing().xi2, hops.sr.turbulence().a, hops.sr.turbulence().b});
  out.diversity = hops.sr.rounds() * lead / hops.sr.detection_exponent();
  return out;
}

}  // namespace fsorf::e2e
