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

#include <cmath>
#include <limits>
#include <type_traits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "fsorf/e2e_analysis.hpp"

using namespace fsorf;
using namespace fsorf::e2e;

namespace {

const fso::TurbulenceParams kStrong{2.064, 1.342};
const fso::TurbulenceParams kModerate{2.296, 1.822};

fso::FsoLinkConfig fso_config(double mean_snr_db, fso::DetectionMode mode = fso::DetectionMode::IntensityModulation,
                              fso::TurbulenceParams turb = kStrong) {
  fso::FsoLinkConfig cfg;
  cfg.turb = turb;
  cfg.point = {1.44, 1.0};
  cfg.detection = mode;
  cfg.mean_snr_db = mean_snr_db;
  return cfg;
}

rf::RfLinkConfig rf_config(double mean_snr_db, int m_reflectors = 128, double kappa = 2.0) {
  rf::IrsParams irs;
  irs.m_reflectors = m_reflectors;
  irs.kappa = kappa;
  return rf::RfLinkConfig::from_mean_snr(irs, mean_snr_db, 2);
}

double op_at(double sr_db, double rd_db, const HarqConfig& harq, int m_reflectors = 128, double kappa = 2.0) {
  const DualHop hops = make_dual_hop(fso_config(sr_db), rf_config(rd_db, m_reflectors, kappa), harq);
  return outage_probability(hops.sr, hops.rd, harq);
}

}  // namespace

TEST_CASE("harq and per configuration") {
  HarqConfig harq;
  CHECK(harq.snr_threshold() == doctest::Approx(1.0).epsilon(1e-15));
  harq.rate_bpshz = 2.0;
  CHECK(harq.snr_threshold() == doctest::Approx(3.0).epsilon(1e-15));
  harq.rate_bpshz = 0.0;
  CHECK_THROWS(harq.validate());
  PerConfig per;
  per.packet_bits = 0;
  CHECK_THROWS(per.validate());
  per.packet_bits = 16;
  per.t0_cache = 2.5;
  CHECK(per.t0() == 2.5);
}

TEST_CASE("waterfall threshold") {
  for (QuadratureRule rule : {QuadratureRule::TanhSinh, QuadratureRule::GaussKronrod}) {
    PerConfig per;
    per.packet_bits = 1;
    CHECK(std::fabs(waterfall_threshold(per, rule) - 0.25) <= 1e-10);
    per.packet_bits = 128;
    CHECK(waterfall_threshold(per, rule) == doctest::Approx(3.45358971353397481652).epsilon(1e-12));
    per.packet_bits = 1024;
    CHECK(waterfall_threshold(per, rule) == doctest::Approx(5.33704671720655505168).epsilon(1e-12));
    per.packet_bits = 8192;
    CHECK(waterfall_threshold(per, rule) == doctest::Approx(7.27594795462945281449).epsilon(1e-12));
  }
  double prev = 0.0;
  for (int bits : {1, 2, 8, 64, 512, 4096, 32768}) {
    PerConfig per;
    per.packet_bits = bits;
    const double t0 = waterfall_threshold(per);
    CHECK(t0 > prev);
    prev = t0;
  }
  CHECK(packet_error(0.0, 10) == doctest::Approx(1.0 - std::pow(0.5, 10)));
  CHECK(packet_error(30.0, 1024) < 1e-10);
}

TEST_CASE("equivalent CDF combines both hops") {
  const HarqConfig harq;
  const DualHop far = make_dual_hop(fso_config(200.0), rf_config(4.0), harq);
  for (double g : {1.0, 5.0, 20.0}) {
    CHECK(far.sr.cdf(g) < 1e-30);
    CHECK(equivalent_cdf(far.sr, far.rd, g) == doctest::Approx(rf::zrd_cdf(far.rd, g)).epsilon(1e-14));
  }
  const DualHop hops = make_dual_hop(fso_config(15.0), rf_config(5.0), harq);
  CHECK(equivalent_cdf(hops.sr, hops.rd, 1e6) == doctest::Approx(1.0));
  CHECK(equivalent_cdf(hops.sr, hops.rd, 0.0) == 0.0);
  for (double g : {0.1, 1.0, 3.0, 10.0, 40.0}) {
    const double f1 = hops.sr.cdf(g), f2 = rf::zrd_cdf(hops.rd, g);
    const double f = equivalent_cdf(hops.sr, hops.rd, g);
    CHECK(f >= std::max(f1, f2) - 1e-15);
    CHECK(f <= 1.0);
    CHECK(f == doctest::Approx(f1 + f2 - f1 * f2).epsilon(1e-14));
  }
}

TEST_CASE("equivalent PDF") {
  const HarqConfig harq;
  const DualHop hops = make_dual_hop(fso_config(12.0), rf_config(5.0), harq);
  auto f = [&](double g) { return g > 0.0 ? equivalent_pdf(hops.sr, hops.rd, g) : 0.0; };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  // The RF density is sharply peaked; split at its mean.
  const double peak = hops.rd.mean_snr() * harq.rounds_n2;
  const double mass = ts.integrate(f, 0.0, peak, 1e-10) + es.integrate(f, peak, std::numeric_limits<double>::infinity());
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  for (double g : {0.5, 2.0, 6.0, 9.0}) {
    const double h = 1e-4 * g;
    const double fd =
        (equivalent_cdf(hops.sr, hops.rd, g + h) - equivalent_cdf(hops.sr, hops.rd, g - h)) / (2.0 * h);
    CHECK(f(g) == doctest::Approx(fd).epsilon(1e-6));
  }
  const DualHop far = make_dual_hop(fso_config(12.0), rf_config(80.0), harq);
  for (double g : {0.5, 2.0}) CHECK(f(g) >= 0.0);
  for (double g : {0.5, 2.0}) CHECK(equivalent_pdf(far.sr, far.rd, g) == doctest::Approx(far.sr.pdf(g)).epsilon(1e-14));
}

TEST_CASE("outage probability") {
  HarqConfig harq;
  const DualHop hops = make_dual_hop(fso_config(40.0), rf_config(10.0), harq);
  CHECK(outage_probability(hops.sr, hops.rd, harq) == equivalent_cdf(hops.sr, hops.rd, 1.0));
  CHECK_THROWS_AS(outage_probability(hops.sr, hops.rd, harq, 0.0), TruncationError);

  HarqConfig mismatched = harq;
  mismatched.rounds_n1 = 2;
  CHECK_THROWS_AS(outage_probability(hops.sr, hops.rd, mismatched), std::invalid_argument);

  HarqConfig tiny = harq;
  tiny.rate_bpshz = 1e-12;
  CHECK(outage_probability(hops.sr, hops.rd, tiny) < 1e-15);

  // Decreasing in each mean SNR.
  double prev = 1.0;
  for (double sr : {10.0, 20.0, 30.0, 40.0, 50.0}) {
    const double op = op_at(sr, 8.0, harq);
    CHECK(op < prev);
    prev = op;
  }
  prev = 1.0;
  for (double rd : {-4.0, -2.0, 0.0, 2.0}) {
    const double op = op_at(20.0, rd, harq);
    CHECK(op < prev);
    prev = op;
  }
}

TEST_CASE("outage improves with rounds, reflectors and phase concentration") {
  HarqConfig harq;
  double prev = 1.0;
  for (int n1 : {1, 2, 3, 4}) {
    harq.rounds_n1 = n1;
    const double op = op_at(20.0, 40.0, harq);
    CHECK(op < prev);
    prev = op;
  }
  harq = {};
  prev = 1.0;
  for (int n2 : {1, 2, 3}) {
    harq.rounds_n2 = n2;
    const double op = op_at(60.0, -2.0, harq);
    CHECK(op < prev);
    prev = op;
  }
  harq = {};
  // Fixed gamma0: the mean SNR grows as M^2.
  prev = 1.0;
  for (int m : {24, 32, 48, 64}) {
    rf::IrsParams irs;
    irs.m_reflectors = m;
    rf::RfLinkConfig rd;
    rd.irs = irs;
    rd.gamma0_db = -33.0;
    rd.rounds_n2 = harq.rounds_n2;
    const DualHop hops = make_dual_hop(fso_config(60.0), rd, harq);
    const double op = outage_probability(hops.sr, hops.rd, harq);
    CHECK(op < prev);
    prev = op;
  }
  prev = 1.0;
  // Fixed mean SNR: the phase concentration acts through the Nakagami shape.
  for (double kappa : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const DualHop hops = make_dual_hop(fso_config(60.0), rf_config(-1.0, 128, kappa), harq);
    const double op = outage_probability(hops.sr, hops.rd, harq);
    CHECK(op < prev);
    prev = op;
  }
}

TEST_CASE("packet error rate") {
  const HarqConfig harq;
  PerConfig per;
  per.packet_bits = 1024;
  const DualHop hops = make_dual_hop(fso_config(20.0), rf_config(6.0), harq);
  const double t0 = per.t0();
  CHECK(per_closed_form(hops.sr, hops.rd, per) ==
        doctest::Approx(equivalent_cdf(hops.sr, hops.rd, t0)).epsilon(1e-14));
  PerConfig near_zero = per;
  near_zero.t0_cache = 1e-12;
  CHECK(per_closed_form(hops.sr, hops.rd, near_zero) < 1e-12);
  const DualHop dark = make_dual_hop(fso_config(-40.0), rf_config(-40.0), harq);
  CHECK(per_closed_form(dark.sr, dark.rd, per) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("termwise PER pieces reproduce the reference") {
  const HarqConfig harq;
  PerConfig per;
  per.packet_bits = 1024;
  const double t0 = per.t0();
  for (double sr : {10.0, 25.0}) {
    for (double rd : {4.5, 7.5}) {
      const DualHop hops = make_dual_hop(fso_config(sr), rf_config(rd), harq);
      const PerTerms j = per_terms(hops.sr, hops.rd, t0);
      const double f1 = hops.sr.cdf(t0), f2 = rf::zrd_cdf(hops.rd, t0);
      INFO("sr=" << sr << " rd=" << rd);
      CHECK(j.j1 == doctest::Approx(f1).epsilon(1e-10));
      CHECK(j.j2 == doctest::Approx(f2).epsilon(1e-14));
      CHECK(j.j3 + j.j4 == doctest::Approx(f1 * f2).epsilon(1e-8));
      CHECK(j.per() == doctest::Approx(per_closed_form(hops.sr, hops.rd, per)).epsilon(1e-9));
    }
  }
}

TEST_CASE("positive 2F2 argument breaks the PER identity") {
  const HarqConfig harq;
  PerConfig per;
  per.packet_bits = 1024;
  const DualHop hops = make_dual_hop(fso_config(20.0), rf_config(6.0), harq);
  const PerTerms j = per_terms(hops.sr, hops.rd, per.t0(), J3Argument::Positive);
  CHECK(std::fabs(j.per() / per_closed_form(hops.sr, hops.rd, per) - 1.0) > 1e-3);
}

TEST_CASE("diversity gain depends on the FSO hop only") {
  static_assert(std::is_same_v<decltype(&diversity_gain), double (*)(const fso::FsoLinkConfig&, const HarqConfig&)>);
  HarqConfig harq;
  fso::FsoLinkConfig cfg = fso_config(50.0, fso::DetectionMode::IntensityModulation, kModerate);
  CHECK(diversity_gain(cfg, harq) == doctest::Approx(2.16).epsilon(1e-14));
  cfg.detection = fso::DetectionMode::Heterodyne;
  CHECK(diversity_gain(cfg, harq) == doctest::Approx(4.32).epsilon(1e-14));
  cfg.point.xi2 = 4.0;
  CHECK(diversity_gain(cfg, harq) == doctest::Approx(3.0 * 1.822).epsilon(1e-14));
  harq.rounds_n2 = 5;
  CHECK(diversity_gain(cfg, harq) == doctest::Approx(3.0 * 1.822).epsilon(1e-14));
}

TEST_CASE("asymptotic outage") {
  HarqConfig harq;
  for (fso::DetectionMode mode : {fso::DetectionMode::Heterodyne, fso::DetectionMode::IntensityModulation}) {
    for (double sr : {70.0, 80.0}) {
      const fso::FsoLinkConfig cfg = fso_config(sr, mode, kModerate);
      const DualHop hops = make_dual_hop(cfg, rf_config(50.0), harq);
      const double ratio = asymptotic_op(cfg, harq) / outage_probability(hops.sr, hops.rd, harq);
      CHECK(ratio == doctest::Approx(1.0).epsilon(0.1));
    }
  }
  // Higher-exponent branches still bend the slope at 70-80 dB; far out only
  // the smallest exponent is left.
  auto slope = [&](double lo_db) {
    const fso::FsoLinkConfig lo = fso_config(lo_db, fso::DetectionMode::IntensityModulation, kModerate);
    const fso::FsoLinkConfig hi = fso_config(lo_db + 10.0, fso::DetectionMode::IntensityModulation, kModerate);
    return std::log10(asymptotic_op(lo, harq) / asymptotic_op(hi, harq));
  };
  const double div = diversity_gain(fso_config(70.0, fso::DetectionMode::IntensityModulation, kModerate), harq);
  CHECK(slope(70.0) == doctest::Approx(div).epsilon(0.05));
  CHECK(slope(70.0) < div);
  CHECK(slope(200.0) == doctest::Approx(div).epsilon(1e-3));
}

TEST_CASE("evaluate collects every component") {
  const HarqConfig harq;
  PerConfig per;
  per.packet_bits = 128;
  const DualHop hops = make_dual_hop(fso_config(20.0), rf_config(6.0), harq);
  const E2eResult res = evaluate(hops, harq, per);
  CHECK(res.op == outage_probability(hops.sr, hops.rd, harq));
  CHECK(res.per == doctest::Approx(per_closed_form(hops.sr, hops.rd, per)).epsilon(1e-15));
  CHECK(res.op == doctest::Approx(res.po_sr + res.po_rd - res.po_sr * res.po_rd).epsilon(1e-14));
  CHECK(res.per == doctest::Approx(res.f_sr_t0 + res.f_rd_t0 - res.f_sr_t0 * res.f_rd_t0).epsilon(1e-14));
  CHECK(res.diversity == doctest::Approx(3.0 * 1.342 / 2.0).epsilon(1e-14));
}
