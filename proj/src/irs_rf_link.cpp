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

#include "fsorf/irs_rf_link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "fsorf/specfun.hpp"

namespace fsorf::rf {

namespace {

// Wraps an angle to [-pi, pi).
double wrap(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta + std::numbers::pi, two_pi);
  if (theta < 0.0) theta += two_pi;
  return theta - std::numbers::pi;
}

}  // namespace

void IrsParams::validate() const {
  if (m_reflectors < 1) throw std::invalid_argument("rf.m_reflectors must be at least 1");
  if (!(kappa >= 0.0)) throw std::invalid_argument("rf.kappa must be nonnegative");
  if (!(rician_k >= 0.0) || std::isinf(rician_k)) throw std::invalid_argument("rf.rician_k must be finite and nonnegative");
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("rf.delta must lie in (0, 1]");
  if (!(pathloss_exp >= 0.0)) throw std::invalid_argument("rf.pathloss_exp must be nonnegative");
  if (!(d1_m > 0.0) || !(d2_m > 0.0)) throw std::invalid_argument("rf.d1_m and rf.d2_m must be positive");
}

RfLinkConfig RfLinkConfig::from_mean_snr(const IrsParams& irs, double mean_snr_db, int rounds_n2) {
  RfLinkConfig cfg;
  cfg.irs = irs;
  cfg.rounds_n2 = rounds_n2;
  const double m = static_cast<double>(irs.m_reflectors);
  cfg.gamma0_db = mean_snr_db - 10.0 * std::log10(m * m);
  return cfg;
}

void RfLinkConfig::validate() const {
  irs.validate();
  if (!std::isfinite(gamma0_db)) throw std::invalid_argument("rf.gamma0_db must be finite");
  if (rounds_n2 < 1) throw std::invalid_argument("rf.rounds_n2 must be at least 1");
  if (!(noise_var > 0.0)) throw std::invalid_argument("rf.noise_var must be positive");
}

double RfLinkConfig::gamma0() const { return std::pow(10.0, gamma0_db / 10.0); }

double RfLinkConfig::mean_snr() const {
  const double m = static_cast<double>(irs.m_reflectors);
  double mean = m * m * gamma0();
  if (apply_path_loss) mean *= std::pow(irs.d1_m * irs.d2_m, -irs.pathloss_exp);
  return mean;
}

double von_mises_trig_moment(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("von_mises_trig_moment: kappa must be nonnegative");
  if (std::isinf(kappa)) return 1.0;
  return specfun::bessel_i_scaled(1.0, kappa) / specfun::bessel_i_scaled(0.0, kappa);
}

double von_mises_second_trig_moment(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("von_mises_second_trig_moment: kappa must be nonnegative");
  if (std::isinf(kappa)) return 1.0;
  return specfun::bessel_i_scaled(2.0, kappa) / specfun::bessel_i_scaled(0.0, kappa);
}

double rician_moment(double n, double k) {
  if (!(k >= 0.0)) throw std::domain_error("rician_moment: k must be nonnegative");
  // exp(-k) 1F1(1 + n/2; 1; k), a positive series summed with the exp folded in.
  const double p = 1.0 + 0.5 * n;
  double log_term = -k;
  double sum = std::exp(log_term);
  for (int j = 0; j < 100000; ++j) {
    if (k == 0.0) break;
    const double dj = static_cast<double>(j);
    log_term += std::log((p + dj) * k) - 2.0 * std::log(dj + 1.0);
    const double t = std::exp(log_term);
    sum += t;
    if (dj > k && t < 1e-17 * sum) break;
  }
  return std::pow(1.0 / (k + 1.0), 0.5 * n) * std::tgamma(p) * sum;
}

double rayleigh_moment(double n) { return std::tgamma(1.0 + 0.5 * n); }

AmplitudeMoments cascade_amplitude_moments(const IrsParams& irs) {
  irs.validate();
  AmplitudeMoments out;
  double* slots[4] = {&out.m1, &out.m2, &out.m3, &out.m4};
  for (int n = 1; n <= 4; ++n) {
    const double dn = static_cast<double>(n);
    const double fading = irs.fading == FadingModel::LineOfSight ? 1.0 : rician_moment(dn, irs.rician_k) * rayleigh_moment(dn);
    *slots[n - 1] = std::pow(irs.delta, dn) * fading;
  }
  if (irs.fading == FadingModel::RicianRayleigh) {
    // Even moments are polynomial in k; use the exact forms.
    const double k = irs.rician_k;
    out.m2 = irs.delta * irs.delta;
    out.m4 = std::pow(irs.delta, 4) * 2.0 * (k * k + 4.0 * k + 2.0) / ((k + 1.0) * (k + 1.0));
  }
  return out;
}

SumMoments cascade_sum_moments(const IrsParams& irs) {
  const AmplitudeMoments a = cascade_amplitude_moments(irs);
  const double rho1 = von_mises_trig_moment(irs.kappa);
  const double rho2 = von_mises_second_trig_moment(irs.kappa);
  const double m = static_cast<double>(irs.m_reflectors);

  // Z_i = A_i exp(j Θ_i) = mu + W_i with W_i zero mean.
  const double mu = a.m1 * rho1;
  const double var = a.m2 - mu * mu;
  const double pseudo = a.m2 * rho2 - mu * mu;
  const double re_w_abs2 = a.m3 * rho1 - mu * a.m2 * (1.0 + rho2) - mu * a.m2 + 2.0 * mu * mu * mu;
  const double abs_w4 = a.m4 + 2.0 * mu * mu * a.m2 * (1.0 + rho2) + std::pow(mu, 4) - 4.0 * mu * a.m3 * rho1 +
                        2.0 * mu * mu * a.m2 - 4.0 * std::pow(mu, 4);

  // T = sum_i Z_i = M mu + V.
  const double abs_v4 = m * abs_w4 + m * (m - 1.0) * (2.0 * var * var + pseudo * pseudo);
  const double t2 = m * m * mu * mu + m * var;
  const double t4 = std::pow(m * mu, 4) + 2.0 * m * m * m * mu * mu * (var + pseudo) + abs_v4 +
                    2.0 * m * m * m * mu * mu * var + 4.0 * m * m * mu * re_w_abs2;
  return SumMoments{t2 / (m * m), t4 / std::pow(m, 4)};
}

NakagamiFit fit_nakagami(const IrsParams& irs) {
  const SumMoments s = cascade_sum_moments(irs);
  const double mu4 = s.second * s.second;
  const double spread = s.fourth - mu4;
  if (!(spread > 1e-14 * mu4)) {
    throw std::domain_error("fit_nakagami: |I|^2 has no variance; the Nakagami surrogate is undefined");
  }
  NakagamiFit fit;
  fit.mu2 = s.second;
  fit.m_shape = mu4 / spread;
  fit.single_reflector = irs.m_reflectors == 1;
  return fit;
}

namespace {

// Best and Fisher rejection sampler with the envelope constant precomputed.
class VonMisesSampler {
 public:
  explicit VonMisesSampler(double kappa) : kappa_(kappa) {
    if (kappa_ >= 1e-8 && kappa_ <= 1e5) {
      const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa_ * kappa_);
      const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa_);
      s_ = (1.0 + rho * rho) / (2.0 * rho);
    }
  }

  /// (cos theta, sin theta) of one draw.
  std::pair<double, double> unit_vector(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (kappa_ < 1e-8 || kappa_ > 1e5) {
      const double theta = angle(rng);
      return {std::cos(theta), std::sin(theta)};
    }
    const double w = std::clamp(cosine(rng), -1.0, 1.0);
    const double sine = std::sqrt((1.0 - w) * (1.0 + w));
    return {w, unit(rng) < 0.5 ? -sine : sine};
  }

  double angle(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (kappa_ < 1e-8) return std::numbers::pi * (2.0 * unit(rng) - 1.0);
    if (kappa_ > 1e5) {
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(kappa_));
      return wrap(normal(rng));
    }
    const double theta = std::acos(std::clamp(cosine(rng), -1.0, 1.0));
    return unit(rng) < 0.5 ? -theta : theta;
  }

 private:
  double cosine(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
      const double z = std::cos(std::numbers::pi * unit(rng));
      const double w = (1.0 + s_ * z) / (s_ + z);
      const double y = kappa_ * (s_ - w);
      const double v = unit(rng);
      if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) return w;
    }
  }

  double kappa_;
  double s_ = 0.0;
};

}  // namespace

double sample_von_mises(double kappa, Rng& rng) {
  if (!(kappa >= 0.0)) throw std::domain_error("von Mises concentration must be nonnegative");
  return VonMisesSampler(kappa).angle(rng);
}

std::complex<double> sample_cascade_gain(const IrsParams& irs, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double k = irs.rician_k;
  const double los = std::sqrt(k / (k + 1.0));
  const double rician_sd = std::sqrt(0.5 / (k + 1.0));
  const double rayleigh_sd = std::sqrt(0.5);
  const VonMisesSampler phase(irs.kappa);
  double re = 0.0, im = 0.0;
  for (int i = 0; i < irs.m_reflectors; ++i) {
    double amp = irs.delta;
    if (irs.fading == FadingModel::RicianRayleigh) {
      const double xr = los + rician_sd * normal(rng);
      const double xi = rician_sd * normal(rng);
      const double yr = rayleigh_sd * normal(rng);
      const double yi = rayleigh_sd * normal(rng);
      amp *= std::sqrt((xr * xr + xi * xi) * (yr * yr + yi * yi));
    }
    const auto [c, sn] = phase.unit_vector(rng);
    re += amp * c;
    im += amp * sn;
  }
  const double m = static_cast<double>(irs.m_reflectors);
  return {re / m, im / m};
}

RfSnrSampler::RfSnrSampler(const RfLinkConfig& cfg, SnrModel model) : cfg_(cfg), model_(model) {
  cfg_.validate();
  if (model_ == SnrModel::NakagamiSurrogate) {
    fit_ = fit_nakagami(cfg_.irs);
  } else {
    fit_.mu2 = cascade_sum_moments(cfg_.irs).second;
    fit_.m_shape = std::numeric_limits<double>::quiet_NaN();
  }
  mean_ = cfg_.mean_snr();
}

double RfSnrSampler::operator()(Rng& rng) const {
  if (model_ == SnrModel::NakagamiSurrogate) {
    std::gamma_distribution<double> gamma(fit_.m_shape, mean_ / fit_.m_shape);
    return gamma(rng);
  }
  return mean_ * std::norm(sample_cascade_gain(cfg_.irs, rng)) / fit_.mu2;
}

double sample_rf_snr(const RfLinkConfig& cfg, Rng& rng, SnrModel model) { return RfSnrSampler(cfg, model)(rng); }

double rd_round_pdf(const RfLinkConfig& cfg, double gamma) {
  RfLinkConfig one = cfg;
  one.rounds_n2 = 1;
  return zrd_pdf(one, gamma);
}

double rd_round_cdf(const RfLinkConfig& cfg, double gamma) {
  RfLinkConfig one = cfg;
  one.rounds_n2 = 1;
  return zrd_cdf(one, gamma);
}

ZrdValue zrd_accumulated(const RfLinkConfig& cfg, double t, double s) {
  cfg.validate();
  if (!(t >= 0.0)) throw std::domain_error("zrd_accumulated: t must be nonnegative");
  if (!(s >= 0.0)) throw std::domain_error("zrd_accumulated: MGF argument must be nonnegative");
  const NakagamiFit fit = fit_nakagami(cfg.irs);
  const double shape = fit.m_shape * cfg.rounds_n2;
  const double rate = fit.m_shape / cfg.mean_snr();
  ZrdValue out;
  if (std::isinf(t)) {
    out.cdf = 1.0;
  } else {
    out.cdf = specfun::reg_lower_gamma(shape, rate * t);
    if (t > 0.0) {
      out.pdf = std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(t) - rate * t - std::lgamma(shape));
    } else if (shape < 1.0) {
      out.pdf = std::numeric_limits<double>::infinity();
    } else if (shape == 1.0) {
      out.pdf = rate;
    }
  }
  out.mgf = std::exp(-shape * std::log1p(s / rate));
  return out;
}

double zrd_cdf(const RfLinkConfig& cfg, double t) { return zrd_accumulated(cfg, t).cdf; }

double zrd_pdf(const RfLinkConfig& cfg, double t) { return zrd_accumulated(cfg, t).pdf; }

}  // namespace fsorf::rf
