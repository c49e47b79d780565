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
#include <vector>

#include "fsorf/bigfloat.hpp"

/// Special-function kernel shared by the analytical evaluators.
///
/// Everything here is pure and reentrant. Double-precision entry points fall
/// back to MPFR internally whenever a series would lose more digits to
/// cancellation than the requested tolerance allows.
namespace fsorf::specfun {

struct Accuracy {
  double rel_tol = 1e-12;
  int max_terms = 10000;

  void validate() const;
};

/// Raised when a series does not reach its tolerance within the term budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_value, int terms_used)
      : std::runtime_error(what), partial_value_(partial_value), terms_used_(terms_used) {}

  double partial_value() const { return partial_value_; }
  int terms_used() const { return terms_used_; }

 private:
  double partial_value_;
  int terms_used_;
};

double log_gamma(double x);

/// Regularized lower incomplete gamma P(s, x).
double reg_lower_gamma(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), accurate in the tail.
double reg_upper_gamma(double s, double x);

double beta(double p, double q);

/// 2F2(a1, a2; b1, b2; z) by direct summation of the defining series.
double hyp2f2(double a1, double a2, double b1, double b2, double z, const Accuracy& acc = {});

/// First `count` series terms of 2F2 produced by the term recurrence.
std::vector<double> hyp2f2_terms(double a1, double a2, double b1, double b2, double z, int count);

/// Modified Bessel function of the first kind. Throws std::overflow_error when
/// the unscaled value is not representable; use bessel_i_scaled there.
double bessel_i(double order, double x);

/// exp(-x) * I_order(x).
double bessel_i_scaled(double order, double x);

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
double gaussian_q(double x);

// ---------------------------------------------------------------------------
// G^{3,0}_{1,3}(z | xi2 + 1 ; xi2, a, b)
// ---------------------------------------------------------------------------

struct G3013Params {
  double xi2;
  double a;
  double b;
};

struct ResolvedG3013 {
  G3013Params params;
  bool perturbed = false;
};

/// Parameters closer than 1e-9 to an integer spacing make two pole families
/// collide. The smaller parameter of each such pair is shifted by 1e-6.
ResolvedG3013 resolve_g3013(const G3013Params& params);

/// Residues of the Mellin-Barnes integrand, one coefficient set per pole family:
///   G(z) = lone * z^xi2 + sum_k a_family[k] z^(a+k) + sum_k b_family[k] z^(b+k).
/// The 1/(xi2 + s) factor leaves a single pole in the xi2 family.
struct G3013Residues {
  BigFloat lone;
  std::vector<BigFloat> a_family;
  std::vector<BigFloat> b_family;
};

/// `params` must already be non-degenerate (see resolve_g3013).
G3013Residues g3013_residues(const G3013Params& params, int terms, long bits);

struct MeijerValue {
  double value = 0.0;
  bool perturbed = false;
  int terms = 0;
  long bits = 0;
};

MeijerValue meijer_g_3013(const G3013Params& params, double z, const Accuracy& acc = {});

}  // namespace fsorf::specfun
