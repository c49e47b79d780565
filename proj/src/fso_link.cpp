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

#include "fsorf/fso_link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fsorf::fso {

using specfun::BigFloat;

namespace {

constexpr int kTailTerms = 5;

struct LaplaceBranch {
  int l1, l2, l3;
  std::vector<BigFloat> c;
};

// Cauchy product truncated to `limit` entries.
std::vector<BigFloat> cauchy(const std::vector<BigFloat>& p, const std::vector<BigFloat>& q, int limit, long bits) {
  const int len = std::min<int>(limit, static_cast<int>(p.size() + q.size()) - 1);
  std::vector<BigFloat> out(static_cast<std::size_t>(len), BigFloat(0.0, bits));
  for (int i = 0; i < static_cast<int>(p.size()) && i < len; ++i) {
    for (int j = 0; j < static_cast<int>(q.size()) && i + j < len; ++j) {
      out[static_cast<std::size_t>(i + j)].fma_add(p[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

// Laplace-domain coefficients of one round in x = z / mean: the density is
// sum_j C_j x^(e_j/r - 1) / Γ(e_j/r), one coefficient set per pole family.
std::vector<LaplaceBranch> one_round(const specfun::G3013Params& p, int r, int terms, long bits, bool absolute) {
  const specfun::G3013Residues res = specfun::g3013_residues(p, terms, bits);
  const BigFloat xi2(p.xi2, bits), a(p.a, bits), b(p.b, bits);
  const BigFloat pre = xi2 / (specfun::gamma(a) * specfun::gamma(b)) / static_cast<double>(r);
  const BigFloat cmu = a * b * xi2 / (xi2 + 1.0);

  auto family = [&](const std::vector<BigFloat>& residues, const BigFloat& first) {
    std::vector<BigFloat> out;
    out.reserve(residues.size());
    std::vector<BigFloat> gam;
    gam.reserve(residues.size());
    BigFloat power = specfun::pow(cmu, first);
    for (std::size_t k = 0; k < residues.size(); ++k) {
      const BigFloat eps = (first + static_cast<double>(k)) / static_cast<double>(r);
      if (k < static_cast<std::size_t>(r)) {
        gam.push_back(specfun::gamma(eps));
      } else {
        gam.push_back(gam[k - static_cast<std::size_t>(r)] * (eps - 1.0));
      }
      BigFloat c = pre * residues[k] * power * gam[k];
      out.push_back(absolute ? specfun::abs(c) : c);
      power *= cmu;
    }
    return out;
  };

  BigFloat lone = pre * res.lone * specfun::pow(cmu, xi2) * specfun::gamma(xi2 / static_cast<double>(r));
  if (absolute) lone = specfun::abs(lone);
  return {LaplaceBranch{1, 0, 0, {lone}}, LaplaceBranch{0, 1, 0, family(res.a_family, a)},
          LaplaceBranch{0, 0, 1, family(res.b_family, b)}};
}

std::vector<LaplaceBranch> power_of(const std::vector<LaplaceBranch>& base, int rounds, int terms, long bits) {
  std::vector<LaplaceBranch> acc = base;
  for (int step = 1; step < rounds; ++step) {
    std::map<std::tuple<int, int, int>, std::vector<BigFloat>> merged;
    for (const LaplaceBranch& lhs : acc) {
      for (const LaplaceBranch& rhs : base) {
        const auto key = std::make_tuple(lhs.l1 + rhs.l1, lhs.l2 + rhs.l2, lhs.l3 + rhs.l3);
        std::vector<BigFloat> prod = cauchy(lhs.c, rhs.c, terms, bits);
        auto it = merged.find(key);
        if (it == merged.end()) {
          merged.emplace(key, std::move(prod));
        } else {
          std::vector<BigFloat>& dst = it->second;
          if (dst.size() < prod.size()) dst.resize(prod.size(), BigFloat(0.0, bits));
          for (std::size_t n = 0; n < prod.size(); ++n) dst[n] += prod[n];
        }
      }
    }
    acc.clear();
    for (auto& [key, seq] : merged) {
      acc.push_back(LaplaceBranch{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::move(seq)});
    }
  }
  return acc;
}

// Converts Laplace coefficients to CDF weights w = C / Γ(eps + 1).
std::vector<SeriesBranch> to_cdf(const std::vector<LaplaceBranch>& laplace, const specfun::G3013Params& p, int r,
                                 long bits) {
  std::vector<SeriesBranch> out;
  out.reserve(laplace.size());
  const BigFloat xi2(p.xi2, bits), a(p.a, bits), b(p.b, bits);
  for (const LaplaceBranch& lb : laplace) {
    SeriesBranch sb;
    sb.l1 = lb.l1;
    sb.l2 = lb.l2;
    sb.l3 = lb.l3;
    const BigFloat offset = (xi2 * static_cast<double>(lb.l1) + a * static_cast<double>(lb.l2) +
                             b * static_cast<double>(lb.l3)) /
                            static_cast<double>(r);
    sb.offset = offset.to_double();
    sb.exact_offset = offset;
    std::vector<BigFloat> gam;
    gam.reserve(lb.c.size());
    sb.cdf_coeffs.reserve(lb.c.size());
    for (std::size_t n = 0; n < lb.c.size(); ++n) {
      const BigFloat eps = offset + static_cast<double>(n) / static_cast<double>(r);
      if (n < static_cast<std::size_t>(r)) {
        gam.push_back(specfun::gamma(eps + 1.0));
      } else {
        gam.push_back(gam[n - static_cast<std::size_t>(r)] * eps);
      }
      sb.cdf_coeffs.push_back(lb.c[n] / gam[n]);
    }
    out.push_back(std::move(sb));
  }
  return out;
}

double log2_add(double lhs, double rhs) {
  if (lhs == -std::numeric_limits<double>::infinity()) return rhs;
  if (rhs == -std::numeric_limits<double>::infinity()) return lhs;
  const double hi = std::max(lhs, rhs);
  return hi + std::log2(std::exp2(lhs - hi) + std::exp2(rhs - hi));
}

// log2 of sum |w_n| x^eps over all terms, and over the last few terms of each branch.
std::pair<double, double> magnitude_at(const std::vector<SeriesBranch>& branches, int r, double x) {
  const double lx = std::log2(x);
  double total = -std::numeric_limits<double>::infinity();
  double tail = total;
  for (const SeriesBranch& sb : branches) {
    const int len = static_cast<int>(sb.cdf_coeffs.size());
    for (int n = 0; n < len; ++n) {
      const double lw = sb.cdf_coeffs[static_cast<std::size_t>(n)].log2_abs();
      if (!std::isfinite(lw)) continue;
      const double lt = lw + (sb.offset + static_cast<double>(n) / r) * lx;
      total = log2_add(total, lt);
      // Single-coefficient branches are exact and carry no truncation tail.
      if (len > 1 && n >= len - kTailTerms) tail = log2_add(tail, lt);
    }
  }
  return {total, tail};
}

BigFloat horner_branch(const SeriesBranch& sb, const std::vector<BigFloat>& coeffs, const BigFloat& x,
                       const BigFloat& y, double extra_power, long bits) {
  BigFloat acc(0.0, bits);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc *= y;
    acc += *it;
  }
  return acc * specfun::pow(x, sb.exact_offset + extra_power);
}

}  // namespace

void TurbulenceParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("fso.a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("fso.b must be positive");
}

void PointingParams::validate() const {
  if (!(xi2 > 0.0) || !std::isfinite(xi2)) throw std::invalid_argument("fso.xi2 must be positive");
  if (!(A0 > 0.0) || A0 > 1.0) throw std::invalid_argument("fso.A0 must lie in (0, 1]");
}

int detection_exponent(DetectionMode mode) { return mode == DetectionMode::Heterodyne ? 1 : 2; }

void FsoLinkConfig::validate() const {
  turb.validate();
  point.validate();
  if (!std::isfinite(mean_snr_db)) throw std::invalid_argument("fso.mean_snr_db must be finite");
  if (rounds_n1 < 1) throw std::invalid_argument("fso.rounds_n1 must be at least 1");
  if (!(path_loss > 0.0) || path_loss > 1.0) throw std::invalid_argument("fso.path_loss must lie in (0, 1]");
  if (!(oe_gain > 0.0)) throw std::invalid_argument("fso.oe_gain must be positive");
}

double FsoLinkConfig::mean_irradiance() const { return point.A0 * point.xi2 / (point.xi2 + 1.0); }

double FsoLinkConfig::mean_snr() const { return std::pow(10.0, mean_snr_db / 10.0); }

double FsoLinkConfig::effective_mean_snr() const { return mean_snr() * std::pow(path_loss, r()); }

double FsoLinkConfig::noise_var() const { return std::pow(oe_gain * mean_irradiance(), r()) / mean_snr(); }

double composite_pdf(double h, const TurbulenceParams& turb, const PointingParams& point) {
  turb.validate();
  point.validate();
  if (!(h > 0.0)) throw std::domain_error("composite_pdf: irradiance must be positive");
  const double z = turb.a * turb.b * h / point.A0;
  const specfun::MeijerValue g = specfun::meijer_g_3013({point.xi2, turb.a, turb.b}, z);
  const double log_pre = std::log(point.xi2) - std::log(h) - std::lgamma(turb.a) - std::lgamma(turb.b);
  return std::max(0.0, std::exp(log_pre) * g.value);
}

double sample_turbulence(const TurbulenceParams& turb, Rng& rng) {
  std::gamma_distribution<double> large(turb.a, 1.0 / turb.a);
  std::gamma_distribution<double> small(turb.b, 1.0 / turb.b);
  const double x = large(rng);
  return x * small(rng);
}

double sample_pointing(const PointingParams& point, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return point.A0 * std::pow(unit(rng), 1.0 / point.xi2);
}

double sample_irradiance(const FsoLinkConfig& cfg, Rng& rng) {
  const double ha = sample_turbulence(cfg.turb, rng);
  return cfg.path_loss * ha * sample_pointing(cfg.point, rng);
}

double sample_snr(const FsoLinkConfig& cfg, Rng& rng) {
  return std::pow(cfg.oe_gain * sample_irradiance(cfg, rng), cfg.r()) / cfg.noise_var();
}

GenPowerSeries build_series(const TurbulenceParams& turb, const PointingParams& point, int r, int rounds,
                            double mean_snr, const SeriesOptions& opts) {
  turb.validate();
  point.validate();
  opts.acc.validate();
  if (r != 1 && r != 2) throw std::invalid_argument("detection exponent must be 1 or 2");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  if (!(mean_snr > 0.0)) throw std::invalid_argument("mean SNR must be positive");
  if (!(opts.coverage > 0.0)) throw std::invalid_argument("series coverage must be positive");

  const specfun::ResolvedG3013 resolved = specfun::resolve_g3013({point.xi2, turb.a, turb.b});
  const specfun::G3013Params& p = resolved.params;

  GenPowerSeries out;
  out.turb_ = turb;
  out.point_ = point;
  out.r_ = r;
  out.rounds_ = rounds;
  out.scale_ = mean_snr;
  out.opts_ = opts;
  out.coverage_ = opts.coverage;
  out.perturbed_ = resolved.perturbed;
  if (resolved.perturbed) {
    out.warnings_.push_back("pole families collide; parameters perturbed by 1e-6");
  }

  int terms = 32;
  while (true) {
    if (terms > opts.acc.max_terms) {
      throw specfun::ConvergenceError("series: term budget exhausted before reaching coverage", 0.0, terms);
    }
    // Magnitude survey on absolute values sizes the working precision.
    const auto survey = to_cdf(power_of(one_round(p, r, terms, 64, true), rounds, terms, 64), p, r, 64);
    const double log2_abs_sum = magnitude_at(survey, r, opts.coverage).first;
    const long bits = 64 + static_cast<long>(std::ceil(std::max(0.0, log2_abs_sum))) -
                      static_cast<long>(std::floor(std::log2(opts.acc.rel_tol))) + 16;

    out.branches_ = to_cdf(power_of(one_round(p, r, terms, bits, false), rounds, terms, bits), p, r, bits);
    out.bits_ = bits;
    out.terms_ = terms;
    const double value = out.unclamped_cdf(opts.coverage);
    const double tail = std::exp2(magnitude_at(out.branches_, r, opts.coverage).second);
    const bool in_range = value > 0.0 && value <= 1.0 + 1e3 * opts.acc.rel_tol;
    if (in_range && tail <= opts.acc.rel_tol * value) {
      out.tail_bound_ = tail;
      out.edge_survival_ = std::max(0.0, 1.0 - value);
      break;
    }
    terms *= 2;
  }
  return out;
}

double GenPowerSeries::leading_exponent() const {
  double lead = std::numeric_limits<double>::infinity();
  for (const SeriesBranch& sb : branches_) lead = std::min(lead, sb.offset);
  return lead;
}

double GenPowerSeries::unclamped_cdf(double x) const {
  const BigFloat xb(x, bits_);
  const BigFloat y = specfun::pow(xb, 1.0 / r_);
  BigFloat total(0.0, bits_);
  for (const SeriesBranch& sb : branches_) total += horner_branch(sb, sb.cdf_coeffs, xb, y, 0.0, bits_);
  return total.to_double();
}

const GenPowerSeries* GenPowerSeries::extension_for(double x) const {
  // Below the working accuracy of the CDF itself.
  if (edge_survival_ <= 10.0 * opts_.acc.rel_tol) return nullptr;
  std::shared_ptr<const GenPowerSeries> wider;
  {
    const std::lock_guard<std::mutex> guard(ext_->lock);
    if (!ext_->wider) {
      SeriesOptions opts = opts_;
      opts.coverage = 4.0 * coverage_;
      ext_->wider = std::make_shared<const GenPowerSeries>(build_series(turb_, point_, r_, rounds_, scale_, opts));
    }
    wider = ext_->wider;
  }
  if (x <= wider->coverage()) return wider.get();
  return wider->extension_for(x);
}

double GenPowerSeries::normalized_cdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("cdf: NaN argument");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x > coverage_) {
    const GenPowerSeries* ext = extension_for(x);
    return ext == nullptr ? 1.0 : ext->normalized_cdf(x);
  }
  return std::clamp(unclamped_cdf(x), 0.0, 1.0);
}

double GenPowerSeries::normalized_pdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("pdf: NaN argument");
  if (x <= 0.0 || std::isinf(x)) return 0.0;
  if (x > coverage_) {
    const GenPowerSeries* ext = extension_for(x);
    return ext == nullptr ? 0.0 : ext->normalized_pdf(x);
  }
  const BigFloat xb(x, bits_);
  const BigFloat y = specfun::pow(xb, 1.0 / r_);
  BigFloat total(0.0, bits_);
  for (const SeriesBranch& sb : branches_) {
    std::vector<BigFloat> scaled;
    scaled.reserve(sb.cdf_coeffs.size());
    for (std::size_t n = 0; n < sb.cdf_coeffs.size(); ++n) {
      scaled.push_back(sb.cdf_coeffs[n] * (sb.exact_offset + static_cast<double>(n) / r_));
    }
    total += horner_branch(sb, scaled, xb, y, -1.0, bits_);
  }
  return std::max(0.0, total.to_double());
}

double GenPowerSeries::leading_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  double total = 0.0;
  for (const SeriesBranch& sb : branches_) {
    if (sb.cdf_coeffs.empty()) continue;
    const double w = sb.cdf_coeffs.front().to_double();
    total += w * std::pow(x, sb.offset);
  }
  return total;
}

std::vector<SeriesTerm> GenPowerSeries::flat_terms() const {
  std::vector<SeriesTerm> out;
  for (std::size_t t = 0; t < branches_.size(); ++t) {
    const SeriesBranch& sb = branches_[t];
    for (std::size_t n = 0; n < sb.cdf_coeffs.size(); ++n) {
      out.push_back(SeriesTerm{sb.offset + static_cast<double>(n) / r_, sb.cdf_coeffs[n].to_double(),
                               static_cast<int>(t), static_cast<int>(n)});
    }
  }
  return out;
}

GenPowerSeries GenPowerSeries::rescaled(double mean_snr) const {
  if (!(mean_snr > 0.0)) throw std::invalid_argument("mean SNR must be positive");
  GenPowerSeries out = *this;
  out.scale_ = mean_snr;
  return out;
}

GenPowerSeries single_round_series(const FsoLinkConfig& cfg, const SeriesOptions& opts) {
  cfg.validate();
  return build_series(cfg.turb, cfg.point, cfg.r(), 1, cfg.effective_mean_snr(), opts);
}

GenPowerSeries accumulate_rounds(const GenPowerSeries& series, int n1) {
  if (n1 < 1) throw std::invalid_argument("accumulate_rounds: n1 must be at least 1");
  if (n1 == 1) return series;
  return build_series(series.turbulence(), series.pointing(), series.detection_exponent(), series.rounds() * n1,
                      series.domain_scale(), series.options());
}

double accumulated_cdf(const GenPowerSeries& series, double z) { return series.cdf(z); }

double accumulated_pdf(const GenPowerSeries& series, double z) { return series.pdf(z); }

double path_loss_beer_lambert(double visibility_km, double distance_km, double wavelength_nm) {
  if (!(visibility_km > 0.0) || !(distance_km > 0.0) || !(wavelength_nm > 0.0)) {
    throw std::invalid_argument("path_loss_beer_lambert: inputs must be positive");
  }
  if (std::isinf(visibility_km)) return 1.0;
  double q = 0.0;
  if (visibility_km > 50.0) {
    q = 1.6;
  } else if (visibility_km > 6.0) {
    q = 1.3;
  } else if (visibility_km > 1.0) {
    q = 0.16 * visibility_km + 0.34;
  } else if (visibility_km > 0.5) {
    q = visibility_km - 0.5;
  }
  const double sigma = 3.91 / visibility_km * std::pow(wavelength_nm / 550.0, -q);
  return std::exp(-sigma * distance_km);
}

}  // namespace fsorf::fso
