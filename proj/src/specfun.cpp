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

#include "fsorf/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fsorf::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// ln|Γ(x)| for any non-pole real x.
double lgamma_abs(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double frac_distance(double d) { return std::fabs(d - std::round(d)); }

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double hyp2f2_big(double a1, double a2, double b1, double b2, double z, const Accuracy& acc,
                  long bits) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    const BigFloat big_a1(a1, bits), big_a2(a2, bits), big_b1(b1, bits), big_b2(b2, bits), big_z(z, bits);
    BigFloat term(1.0, bits);
    BigFloat sum(1.0, bits);
    double max_log2 = 0.0;
    bool converged = false;
    int n = 0;
    for (; n < acc.max_terms; ++n) {
      const double dn = static_cast<double>(n);
      const double num = (a1 + dn) * (a2 + dn);
      if (num == 0.0) {
        converged = true;
        break;
      }
      const double den = (b1 + dn) * (b2 + dn) * (dn + 1.0);
      term *= big_a1 + dn;
      term *= big_a2 + dn;
      term *= big_z;
      term /= (big_b1 + dn) * (big_b2 + dn);
      term /= dn + 1.0;
      sum += term;
      max_log2 = std::max(max_log2, term.log2_abs());
      const double ratio = std::fabs(num * z / den);
      if (ratio < 0.5 && term.log2_abs() < sum.log2_abs() + std::log2(acc.rel_tol) - 1.0) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("hyp2f2: term budget exhausted", sum.to_double(), n);
    }
    const double lost = max_log2 - sum.log2_abs();
    if (!sum.is_zero() && lost + 64.0 < static_cast<double>(bits)) return sum.to_double();
    bits = static_cast<long>(lost) + 128;
  }
  throw ConvergenceError("hyp2f2: cancellation exceeds working precision", 0.0, acc.max_terms);
}

}  // namespace

void Accuracy::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("Accuracy.rel_tol must be positive");
  if (max_terms < 1) throw std::invalid_argument("Accuracy.max_terms must be at least 1");
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

double reg_lower_gamma(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw std::domain_error("reg_lower_gamma: requires s > 0 and x >= 0");
  }
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(s, x);
}

double reg_upper_gamma(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw std::domain_error("reg_upper_gamma: requires s > 0 and x >= 0");
  }
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(s, x);
}

double beta(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("beta: arguments must be positive");
  return boost::math::beta(p, q);
}

std::vector<double> hyp2f2_terms(double a1, double a2, double b1, double b2, double z, int count) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(std::max(count, 0)));
  double t = 1.0;
  for (int n = 0; n < count; ++n) {
    terms.push_back(t);
    const double dn = static_cast<double>(n);
    t *= (a1 + dn) * (a2 + dn) / ((b1 + dn) * (b2 + dn)) * z / (dn + 1.0);
  }
  return terms;
}

double hyp2f2(double a1, double a2, double b1, double b2, double z, const Accuracy& acc) {
  acc.validate();
  if (is_nonpositive_integer(b1) || is_nonpositive_integer(b2)) {
    throw std::domain_error("hyp2f2: lower parameters must not be non-positive integers");
  }
  if (z == 0.0) return 1.0;

  // Terms are carried as sign * exp(log_mag) so large Pochhammer ratios cannot overflow.
  double log_mag = 0.0;
  int sign = 1;
  CompensatedSum sum;
  sum.add(1.0);
  double abs_sum = 1.0;
  double max_log = 0.0;
  bool converged = false;
  int n = 0;
  for (; n < acc.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double factor = (a1 + dn) * (a2 + dn) / ((b1 + dn) * (b2 + dn)) * z / (dn + 1.0);
    if (factor == 0.0) {
      converged = true;
      break;
    }
    log_mag += std::log(std::fabs(factor));
    if (factor < 0.0) sign = -sign;
    max_log = std::max(max_log, log_mag);
    if (max_log > 600.0) break;
    const double t = sign * std::exp(log_mag);
    sum.add(t);
    abs_sum += std::fabs(t);
    if (std::fabs(factor) < 0.5 && std::fabs(t) <= acc.rel_tol * std::fabs(sum.value())) {
      converged = true;
      break;
    }
  }
  if (max_log > 600.0 || (converged && abs_sum * (n + 8.0) * kEps > acc.rel_tol * std::fabs(sum.value()))) {
    const double lost = std::log2(abs_sum) - std::log2(std::max(std::fabs(sum.value()), 1e-300));
    const long bits = 96 + static_cast<long>(std::max({lost, max_log / std::numbers::ln2, 0.0}));
    return hyp2f2_big(a1, a2, b1, b2, z, acc, bits);
  }
  if (!converged) throw ConvergenceError("hyp2f2: term budget exhausted", sum.value(), n);
  return sum.value();
}

double bessel_i_scaled(double order, double x) {
  if (!(order >= 0.0) || !(x >= 0.0)) throw std::domain_error("bessel_i: requires order >= 0 and x >= 0");
  if (x == 0.0) return order == 0.0 ? 1.0 : 0.0;
  if (std::isinf(x)) return 0.0;
  if (x <= 50.0) {
    // Ascending series, leading term carried in log space with the exp(-x) scale folded in.
    const double half = 0.5 * x;
    double t = std::exp(order * std::log(half) - std::lgamma(order + 1.0) - x);
    double sum = t;
    for (int k = 0; k < 1000; ++k) {
      const double dk = static_cast<double>(k);
      t *= half * half / ((dk + 1.0) * (dk + order + 1.0));
      sum += t;
      if (t < 1e-17 * sum) break;
    }
    return sum;
  }
  // Hankel large-argument expansion.
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::fabs(next) > std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i(double order, double x) {
  const double scaled = bessel_i_scaled(order, x);
  if (x > 0.0 && x + std::log(scaled) >= std::log(std::numeric_limits<double>::max())) {
    throw std::overflow_error("bessel_i: result overflows; use bessel_i_scaled");
  }
  return scaled * std::exp(x);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

ResolvedG3013 resolve_g3013(const G3013Params& params) {
  ResolvedG3013 out{params, false};
  double* slots[3] = {&out.params.xi2, &out.params.a, &out.params.b};
  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        if (frac_distance(*slots[i] - *slots[j]) < 1e-9) {
          double* smaller = *slots[i] <= *slots[j] ? slots[i] : slots[j];
          *smaller += 1e-6;
          changed = true;
        }
      }
    }
    if (!changed) break;
    out.perturbed = true;
  }
  return out;
}

G3013Residues g3013_residues(const G3013Params& params, int terms, long bits) {
  const BigFloat xi2(params.xi2, bits);
  const BigFloat a(params.a, bits);
  const BigFloat b(params.b, bits);
  const BigFloat pi_big = pi(bits);

  G3013Residues out{gamma(a - xi2) * gamma(b - xi2), {}, {}};

  // Residue at s = -p-k of Γ(p+s)Γ(q+s)/(xi2+s):
  //   π / (sin(π(q-p)) Γ(1+p-q+k) k! (xi2-p-k)).
  auto family = [&](const BigFloat& p, const BigFloat& q) {
    std::vector<BigFloat> coeffs;
    coeffs.reserve(static_cast<std::size_t>(terms));
    const BigFloat shift = p - q;
    BigFloat lead = pi_big / (sin(pi_big * (q - p)) * gamma(shift + 1.0));
    for (int k = 0; k < terms; ++k) {
      if (k > 0) {
        lead /= static_cast<double>(k);
        lead /= shift + static_cast<double>(k);
      }
      BigFloat denom = xi2 - p;
      denom -= static_cast<double>(k);
      coeffs.push_back(lead / denom);
    }
    return coeffs;
  };
  out.a_family = family(a, b);
  out.b_family = family(b, a);
  return out;
}

MeijerValue meijer_g_3013(const G3013Params& params, double z, const Accuracy& acc) {
  acc.validate();
  if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error("meijer_g_3013: z must be positive");
  if (!(params.xi2 > 0.0) || !(params.a > 0.0) || !(params.b > 0.0)) {
    throw std::domain_error("meijer_g_3013: parameters must be positive");
  }
  const ResolvedG3013 resolved = resolve_g3013(params);
  const G3013Params& p = resolved.params;
  const double lz = std::log(z);

  // Double-precision magnitude survey: largest term and a term count that
  // reaches the tolerance relative to a conservative estimate of |G|.
  const double lone_log = lgamma_abs(p.a - p.xi2) + lgamma_abs(p.b - p.xi2) + p.xi2 * lz;
  const double asym_log = -2.0 * std::sqrt(z) + 0.5 * (p.a + p.b - 1.5) * lz;
  // Below the double range the residue sums would need thousands of terms.
  if (asym_log + 10.0 < std::log(std::numeric_limits<double>::denorm_min())) {
    return MeijerValue{0.0, resolved.perturbed, 0, 0};
  }
  const double target = std::min(lone_log, asym_log) + std::log(acc.rel_tol) - 5.0;
  auto term_log = [&](double first, double second, int k) {
    const double dk = static_cast<double>(k);
    return std::log(std::numbers::pi) - std::log(std::fabs(std::sin(std::numbers::pi * (second - first)))) +
           (first + dk) * lz - std::lgamma(dk + 1.0) - lgamma_abs(1.0 + first - second + dk) -
           std::log(std::fabs(p.xi2 - first - dk));
  };
  double max_log = lone_log;
  int terms = 0;
  for (int k = 0; k < acc.max_terms; ++k) {
    const double ta = term_log(p.a, p.b, k);
    const double tb = term_log(p.b, p.a, k);
    max_log = std::max({max_log, ta, tb});
    terms = k + 1;
    if (k >= 4 && ta < target && tb < target && static_cast<double>(k) > std::sqrt(z)) break;
  }
  if (terms >= acc.max_terms) {
    throw ConvergenceError("meijer_g_3013: term budget exhausted", 0.0, terms);
  }

  long bits = 96 + static_cast<long>(std::max(0.0, (max_log - std::min(lone_log, asym_log)) / std::numbers::ln2));
  for (int attempt = 0; attempt < 4; ++attempt) {
    const G3013Residues res = g3013_residues(p, terms, bits);
    const BigFloat zb(z, bits);
    auto horner = [&](const std::vector<BigFloat>& c) {
      BigFloat acc_sum(0.0, bits);
      for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc_sum *= zb;
        acc_sum += *it;
      }
      return acc_sum;
    };
    BigFloat total = res.lone * pow(zb, p.xi2);
    total += horner(res.a_family) * pow(zb, p.a);
    total += horner(res.b_family) * pow(zb, p.b);

    const double lost = max_log / std::numbers::ln2 - total.log2_abs();
    if (!total.is_zero() && lost + 64.0 < static_cast<double>(bits)) {
      return MeijerValue{total.to_double(), resolved.perturbed, terms, bits};
    }
    bits = static_cast<long>(std::max(lost, 0.0)) + 160;
  }
  throw ConvergenceError("meijer_g_3013: cancellation exceeds working precision", 0.0, terms);
}

}  // namespace fsorf::specfun
