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

#include <complex>
#include <random>
#include <string>
#include <vector>

/// Relay-to-destination hop through an intelligent reflecting surface with
/// von Mises phase errors: exact cascade sampling, Nakagami moment matching and
/// the Gamma law of the chase-combined SNR.
namespace fsorf::rf {

using Rng = std::mt19937_64;

enum class FadingModel {
  /// Rician R-IRS hop and Rayleigh IRS-D hop, both unit power.
  RicianRayleigh,
  /// Unit constant amplitudes; only the phase error is random.
  LineOfSight,
};

struct IrsParams {
  int m_reflectors = 128;
  double kappa = 2.0;
  double rician_k = 2.0;
  double pathloss_exp = 2.6;
  double d1_m = 10.0;
  double d2_m = 10.0;
  double delta = 1.0;
  FadingModel fading = FadingModel::RicianRayleigh;

  void validate() const;
};

struct NakagamiFit {
  double m_shape = 1.0;
  double mu2 = 1.0;
  /// Set when M = 1, where the central-limit surrogate is not expected to hold.
  bool single_reflector = false;
};

struct AmplitudeMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

struct SumMoments {
  double second = 0.0;
  double fourth = 0.0;
};

enum class SnrModel { ExactCascade, NakagamiSurrogate };

struct RfLinkConfig {
  IrsParams irs;
  double gamma0_db = 0.0;
  int rounds_n2 = 1;
  double noise_var = 1.0;
  /// Multiply the mean SNR by (d1 d2)^-nu instead of folding it into gamma0.
  bool apply_path_loss = false;

  /// Chooses gamma0 so that the mean per-round SNR equals mean_snr_db.
  static RfLinkConfig from_mean_snr(const IrsParams& irs, double mean_snr_db, int rounds_n2);

  void validate() const;
  double gamma0() const;
  /// Mean per-round SNR, M^2 gamma0 (times the distance factor when enabled).
  double mean_snr() const;
};

/// E[cos Θ] = I1(k) / I0(k) for Θ ~ von Mises(0, k).
double von_mises_trig_moment(double kappa);

/// E[cos 2Θ] = I2(k) / I0(k).
double von_mises_second_trig_moment(double kappa);

/// E[alpha^n] for a unit-power Rician amplitude with factor k.
double rician_moment(double n, double k);

/// E[beta^n] for a unit-power Rayleigh amplitude.
double rayleigh_moment(double n);

/// Moments of A = delta alpha beta.
AmplitudeMoments cascade_amplitude_moments(const IrsParams& irs);

/// E|I|^2 and E|I|^4 for I = (1/M) sum_i A_i exp(j Θ_i), exact for i.i.d. terms.
SumMoments cascade_sum_moments(const IrsParams& irs);

NakagamiFit fit_nakagami(const IrsParams& irs);

double sample_von_mises(double kappa, Rng& rng);

/// One draw of I = (1/M) sum_i A_i exp(j Θ_i).
std::complex<double> sample_cascade_gain(const IrsParams& irs, Rng& rng);

/// Per-round SNR sampler; moments are computed once at construction. In exact
/// mode only mu2 is filled in, so constant-modulus cascades remain usable.
class RfSnrSampler {
 public:
  explicit RfSnrSampler(const RfLinkConfig& cfg, SnrModel model = SnrModel::ExactCascade);
  double operator()(Rng& rng) const;
  const NakagamiFit& fit() const { return fit_; }

 private:
  RfLinkConfig cfg_;
  SnrModel model_;
  NakagamiFit fit_;
  double mean_;
};

/// gamma = mean_snr |I|^2 / mu^2 for one exact cascade draw.
double sample_rf_snr(const RfLinkConfig& cfg, Rng& rng, SnrModel model = SnrModel::ExactCascade);

/// Gamma density with shape m and mean mean_snr().
double rd_round_pdf(const RfLinkConfig& cfg, double gamma);
double rd_round_cdf(const RfLinkConfig& cfg, double gamma);

struct ZrdValue {
  double pdf = 0.0;
  double cdf = 0.0;
  double mgf = 1.0;
};

/// Sum of rounds_n2 per-round SNRs: Gamma(m N2, rate m / mean). `s` is the MGF
/// argument, E[exp(-s Z)].
ZrdValue zrd_accumulated(const RfLinkConfig& cfg, double t, double s = 0.0);

double zrd_cdf(const RfLinkConfig& cfg, double t);
double zrd_pdf(const RfLinkConfig& cfg, double t);

}  // namespace fsorf::rf
