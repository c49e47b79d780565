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

#pragma once

#include <stdexcept>
#include <string>

#include "fsorf/fso_link.hpp"
#include "fsorf/irs_rf_link.hpp"

/// End-to-end decode-and-forward analysis: min-SNR combination of the two
/// chase-combined hops, outage, packet error rate and high-SNR behaviour.
namespace fsorf::e2e {

struct HarqConfig {
  int rounds_n1 = 3;
  int rounds_n2 = 2;
  /// Target rate R in bits/s/Hz.
  double rate_bpshz = 1.0;

  void validate() const;
  /// 2^R - 1.
  double snr_threshold() const;
};

enum class Modulation { BpskUncoded };

struct PerConfig {
  int packet_bits = 1024;
  Modulation modulation = Modulation::BpskUncoded;
  /// Waterfall threshold (linear SNR). Computed on demand when not positive.
  double t0_cache = 0.0;

  void validate() const;
  /// t0_cache when set, otherwise waterfall_threshold(*this).
  double t0() const;
};

struct E2eResult {
  double op = 0.0;
  double per = 0.0;
  double diversity = 0.0;
  double po_sr = 0.0;
  double po_rd = 0.0;
  double f_sr_t0 = 0.0;
  double f_rd_t0 = 0.0;
};

/// Thrown when the FSO series truncation bound exceeds the requested tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double bound) : std::runtime_error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// Both hops with their round counts taken from one HarqConfig.
struct DualHop {
  fso::GenPowerSeries sr;
  rf::RfLinkConfig rd;
};

DualHop make_dual_hop(const fso::FsoLinkConfig& fso_cfg, const rf::RfLinkConfig& rf_cfg, const HarqConfig& harq,
                      const fso::SeriesOptions& opts = {});

/// F1 + F2 - F1 F2 for Z = min(Z_SR, Z_RD).
double equivalent_cdf(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, double gamma);
double equivalent_pdf(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, double gamma);

/// Probability that the accumulated equivalent SNR stays below 2^R - 1.
/// The series rounds and rd.rounds_n2 must agree with harq.
double outage_probability(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, const HarqConfig& harq,
                          double truncation_tol = 1e-9);

enum class QuadratureRule { TanhSinh, GaussKronrod };

/// Instantaneous packet error probability of uncoded BPSK, 1 - (1 - Q(sqrt(2 gamma)))^L.
double packet_error(double gamma, int packet_bits);

/// T0 = int_0^inf g(gamma) d gamma.
double waterfall_threshold(const PerConfig& per, QuadratureRule rule = QuadratureRule::TanhSinh);

/// F_SR(T0) + F_RD(T0) - F_SR(T0) F_RD(T0).
double per_closed_form(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, const PerConfig& per);

/// Argument of the 2F2 factor in the termwise J3.
enum class J3Argument {
  /// -c T0, which is what the lower incomplete gamma kernel produces.
  Negative,
  /// +c T0.
  Positive,
};

struct PerTerms {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;
  double j4 = 0.0;
  double per() const { return j1 + j2 - j3 - j4; }
};

/// Termwise evaluation: J1 and J4 from the series terms with the regularized
/// incomplete gamma, J3 with one 2F2 per series term.
PerTerms per_terms(const fso::GenPowerSeries& sr, const rf::RfLinkConfig& rd, double t0,
                   J3Argument j3_arg = J3Argument::Negative);

/// Keeps only the n = 0 coefficient of every series branch; the RF hop is dropped.
double asymptotic_op(const fso::FsoLinkConfig& fso_cfg, const HarqConfig& harq);

/// N1 min(xi^2, a, b) / r.
double diversity_gain(const fso::FsoLinkConfig& fso_cfg, const HarqConfig& harq);

E2eResult evaluate(const DualHop& hops, const HarqConfig& harq, const PerConfig& per);

}  // namespace fsorf::e2e
