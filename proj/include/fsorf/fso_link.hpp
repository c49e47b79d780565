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

#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "fsorf/bigfloat.hpp"
#include "fsorf/specfun.hpp"

/// Source-to-relay optical hop: Gamma-Gamma turbulence with pointing errors,
/// irradiance sampling and the accumulated-SNR law after chase combining.
namespace fsorf::fso {

using Rng = std::mt19937_64;

struct TurbulenceParams {
  double a = 2.064;
  double b = 1.342;

  void validate() const;
};

struct PointingParams {
  double xi2 = 1.44;
  double A0 = 1.0;

  void validate() const;
};

enum class DetectionMode { Heterodyne = 1, IntensityModulation = 2 };

int detection_exponent(DetectionMode mode);

struct FsoLinkConfig {
  TurbulenceParams turb;
  PointingParams point;
  DetectionMode detection = DetectionMode::IntensityModulation;
  double mean_snr_db = 40.0;
  int rounds_n1 = 1;
  double path_loss = 1.0;
  double oe_gain = 1.0;

  void validate() const;
  int r() const { return detection_exponent(detection); }
  double mean_irradiance() const;
  double mean_snr() const;
  /// Mean SNR including the path-loss factor h_l^r.
  double effective_mean_snr() const;
  /// Receiver noise variance implied by mean_snr, oe_gain and the mean irradiance.
  double noise_var() const;
};

/// Density of h = h_a h_p (unit path loss):
///   xi2 / (h Γ(a) Γ(b)) * G^{3,0}_{1,3}(a b h / A0 | xi2 + 1; xi2, a, b).
double composite_pdf(double h, const TurbulenceParams& turb, const PointingParams& point);

/// Unit-mean Gamma-Gamma factor h_a.
double sample_turbulence(const TurbulenceParams& turb, Rng& rng);

/// Pointing factor h_p with CDF (h / A0)^xi2 on (0, A0].
double sample_pointing(const PointingParams& point, Rng& rng);

/// h = h_l h_a h_p.
double sample_irradiance(const FsoLinkConfig& cfg, Rng& rng);

/// One round of instantaneous SNR, (oe_gain h)^r / noise_var.
double sample_snr(const FsoLinkConfig& cfg, Rng& rng);

struct SeriesOptions {
  /// Largest normalized SNR z / mean at which truncation is verified.
  double coverage = 64.0;
  specfun::Accuracy acc{};
};

/// One multinomial branch (l1 copies of the xi2 pole, l2 of the a family,
/// l3 of the b family). In the normalized variable x = z / mean the branch
/// contributes x^offset * sum_n cdf_coeffs[n] x^(n/r) to the CDF.
struct SeriesBranch {
  int l1 = 0;
  int l2 = 0;
  int l3 = 0;
  double offset = 0.0;
  /// offset at working precision; exponents must not be rounded to double.
  specfun::BigFloat exact_offset;
  std::vector<specfun::BigFloat> cdf_coeffs;
};

struct SeriesTerm {
  double exponent;
  double weight;
  int branch;
  int n;
};

/// Accumulated-SNR density and CDF as a sum of real-exponent power series,
///   F(z) = sum_t w_t (z / mean)^eps_t,   f(z) = sum_t w_t eps_t z^(eps_t - 1) / mean^eps_t.
class GenPowerSeries {
 public:
  const TurbulenceParams& turbulence() const { return turb_; }
  const PointingParams& pointing() const { return point_; }
  double domain_scale() const { return scale_; }
  int detection_exponent() const { return r_; }
  int rounds() const { return rounds_; }
  const std::vector<SeriesBranch>& branches() const { return branches_; }
  double coverage() const { return coverage_; }
  double tail_bound() const { return tail_bound_; }
  long precision_bits() const { return bits_; }
  int terms_per_branch() const { return terms_; }
  bool perturbed() const { return perturbed_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const SeriesOptions& options() const { return opts_; }

  double leading_exponent() const;

  /// 1 - F at the coverage point.
  double edge_survival() const { return edge_survival_; }

  /// CDF at normalized SNR x. Beyond coverage a wider series is built once and
  /// cached; once the survival at coverage is negligible the CDF is 1 there.
  double normalized_cdf(double x) const;
  double normalized_pdf(double x) const;
  /// Only the n = 0 coefficient of every branch.
  double leading_cdf(double x) const;

  double cdf(double snr) const { return normalized_cdf(snr / scale_); }
  double pdf(double snr) const { return normalized_pdf(snr / scale_) / scale_; }

  std::vector<SeriesTerm> flat_terms() const;

  /// Same shape, different mean SNR (linear). Coefficients are scale free.
  GenPowerSeries rescaled(double mean_snr) const;

 private:
  friend GenPowerSeries build_series(const TurbulenceParams&, const PointingParams&, int, int, double,
                                     const SeriesOptions&);

  double unclamped_cdf(double x) const;
  /// Series valid at x, or nullptr when x lies in the negligible tail.
  const GenPowerSeries* extension_for(double x) const;

  struct Extension {
    std::mutex lock;
    std::shared_ptr<const GenPowerSeries> wider;
  };

  TurbulenceParams turb_{};
  PointingParams point_{};
  int r_ = 1;
  int rounds_ = 1;
  double scale_ = 1.0;
  SeriesOptions opts_{};
  std::vector<SeriesBranch> branches_;
  double coverage_ = 0.0;
  double tail_bound_ = 0.0;
  double edge_survival_ = 1.0;
  std::shared_ptr<Extension> ext_ = std::make_shared<Extension>();
  long bits_ = 0;
  int terms_ = 0;
  bool perturbed_ = false;
  std::vector<std::string> warnings_;
};

/// Builds the series for `rounds` i.i.d. rounds directly.
GenPowerSeries build_series(const TurbulenceParams& turb, const PointingParams& point, int r, int rounds,
                            double mean_snr, const SeriesOptions& opts = {});

GenPowerSeries single_round_series(const FsoLinkConfig& cfg, const SeriesOptions& opts = {});

/// n1-fold additive convolution of `series` with itself.
GenPowerSeries accumulate_rounds(const GenPowerSeries& series, int n1);

double accumulated_cdf(const GenPowerSeries& series, double z);
double accumulated_pdf(const GenPowerSeries& series, double z);

/// h_l = exp(-sigma d) with the Kim visibility model for sigma.
double path_loss_beer_lambert(double visibility_km, double distance_km, double wavelength_nm);

}  // namespace fsorf::fso
