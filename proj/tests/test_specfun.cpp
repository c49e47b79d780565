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
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fsorf/specfun.hpp"
#include "oracles.hpp"

using namespace fsorf::specfun;
using doctest::Approx;

namespace {

bool rel_close(double got, double want, double tol) {
  return std::fabs(got - want) <= tol * std::fabs(want);
}

struct Triple {
  double a, b;
};
const Triple kTriples[] = {{2.064, 1.342}, {2.296, 1.822}, {2.902, 2.51}};

}  // namespace

TEST_CASE("log_gamma") {
  CHECK(log_gamma(1.0) == Approx(0.0).epsilon(1e-15));
  CHECK(rel_close(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-13));
  CHECK(rel_close(log_gamma(10.3), 13.4820367861383569706, 1e-13));
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-2.5), std::domain_error);
}

TEST_CASE("reg_lower_gamma values and domain") {
  CHECK(reg_lower_gamma(2.2, 0.0) == 0.0);
  CHECK(rel_close(reg_lower_gamma(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-14));
  CHECK(rel_close(reg_lower_gamma(3.7, 2.1), 0.207709979677641190532, 1e-12));
  CHECK(rel_close(reg_upper_gamma(3.7, 2.1), 1.0 - 0.207709979677641190532, 1e-12));
  CHECK_THROWS(reg_lower_gamma(0.0, 1.0));
  CHECK_THROWS(reg_lower_gamma(1.0, -1.0));
}

TEST_CASE("reg_lower_gamma is a CDF in x") {
  for (double s : {0.5, 1.0, 3.7, 12.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = 0.1 * i;
      const double p = reg_lower_gamma(s, x);
      CHECK(p >= prev);
      CHECK(p <= 1.0);
      prev = p;
    }
    CHECK(reg_lower_gamma(s, 1e4) == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("beta") {
  CHECK(beta(1.0, 1.0) == Approx(1.0));
  for (double u : {0.3, 1.7, 42.0}) CHECK(rel_close(beta(1.0, u), 1.0 / u, 1e-14));
  CHECK(rel_close(beta(2.5, 3.5), 0.0368155389092553895132, 1e-13));
  CHECK_THROWS(beta(0.0, 1.0));
}

TEST_CASE("hyp2f2") {
  CHECK(hyp2f2(0.3, 4.0, 1.5, 2.5, 0.0) == 1.0);
  CHECK(rel_close(hyp2f2(1.0, 1.0, 2.0, 2.0, 0.5), 1.14030284104317205746, 1e-13));
  CHECK(rel_close(hyp2f2(1.0, 1.0, 2.0, 2.0, -0.5), 0.887684158235496725872, 1e-13));
  for (double z : {-30.0, -3.0, 0.7, 12.0}) CHECK(rel_close(hyp2f2(1.3, 2.4, 1.3, 2.4, z), std::exp(z), 1e-11));
  CHECK_THROWS_AS(hyp2f2(1.0, 1.0, -2.0, 2.0, 0.5), std::domain_error);
  Accuracy tight;
  tight.max_terms = 3;
  CHECK_THROWS_AS(hyp2f2(1.0, 1.0, 2.0, 2.0, 5.0, tight), ConvergenceError);
}

TEST_CASE("hyp2f2 deep cancellation") {
  // 2F2(s, s+e; s+1, s+e+1; -x) has a closed form as a difference of
  // incomplete gammas; compare against it for large negative argument.
  const double s = 60.0, e = 1.5, x = 300.0;
  const double got = hyp2f2(s, s + e, s + 1.0, s + e + 1.0, -x);
  const double direct = (s * (s + e) / e) *
                        (std::exp(std::lgamma(s) - s * std::log(x)) * reg_lower_gamma(s, x) -
                         std::exp(std::lgamma(s + e) - (s + e) * std::log(x)) * reg_lower_gamma(s + e, x));
  CHECK(rel_close(got, direct, 1e-9));
}

TEST_CASE("hyp2f2 term recurrence matches Pochhammer products") {
  const std::vector<double> terms = hyp2f2_terms(1.0, 2.0, 3.0, 1.0, 2.0, 20);
  double fact = 1.0;
  for (int n = 0; n < 20; ++n) {
    if (n > 0) fact *= n;
    double poch_a1 = 1.0, poch_a2 = 1.0, poch_b1 = 1.0, poch_b2 = 1.0;
    for (int k = 0; k < n; ++k) {
      poch_a1 *= 1.0 + k;
      poch_a2 *= 2.0 + k;
      poch_b1 *= 3.0 + k;
      poch_b2 *= 1.0 + k;
    }
    const double direct = poch_a1 * poch_a2 / (poch_b1 * poch_b2) * std::pow(2.0, n) / fact;
    CHECK(rel_close(terms[static_cast<std::size_t>(n)], direct, 1e-14));
  }
}

TEST_CASE("bessel_i") {
  CHECK(bessel_i(0.0, 0.0) == 1.0);
  CHECK(bessel_i(1.0, 0.0) == 0.0);
  CHECK(rel_close(bessel_i(0.0, 2.5), 3.28983914405012303571, 1e-13));
  CHECK(rel_close(bessel_i(1.0, 2.5), 2.51671624528869844153, 1e-13));
  CHECK(rel_close(bessel_i(1.0, 2.5) / bessel_i(0.0, 2.5), 0.764996747588809917277, 1e-13));
  CHECK(rel_close(bessel_i(0.5, 3.0), 4.61482290340760094785, 1e-12));
  CHECK(rel_close(bessel_i(2.0, 40.0), 14159404985256932.2873, 1e-10));
  CHECK(rel_close(bessel_i_scaled(1.0, 60.0) * std::exp(60.0), bessel_i(1.0, 60.0), 1e-14));
  CHECK_THROWS_AS(bessel_i(0.0, 800.0), std::overflow_error);
  CHECK(bessel_i_scaled(0.0, 800.0) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 800.0)).epsilon(1e-3));
}

TEST_CASE("gaussian_q") {
  CHECK(gaussian_q(0.0) == 0.5);
  CHECK(gaussian_q(std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(rel_close(gaussian_q(1.0), 0.158655253931457051415, 1e-14));
}

TEST_CASE("meijer_g_3013 frozen value") {
  const MeijerValue g = meijer_g_3013({1.44, 2.064, 1.342}, 0.5);
  CHECK_FALSE(g.perturbed);
  CHECK(rel_close(g.value, 0.157313650871319262001, 1e-12));
}

TEST_CASE("meijer_g_3013 against contour oracle on a log grid") {
  for (const Triple& t : kTriples) {
    for (int i = 0; i < 20; ++i) {
      const double z = std::pow(10.0, -3.0 + 4.0 * i / 19.0);
      const double series = meijer_g_3013({1.44, t.a, t.b}, z).value;
      const double oracle = fsorf::testing::meijer_contour(1.44, t.a, t.b, z);
      INFO("a=" << t.a << " b=" << t.b << " z=" << z);
      CHECK(rel_close(series, oracle, 1e-8));
    }
  }
}

TEST_CASE("meijer_g_3013 leading small-z order") {
  // min(xi2, a, b) = 1.342 for the strong triple.
  const G3013Params p{1.44, 2.064, 1.342};
  const double z1 = 1e-60, z2 = 1e-59;
  const double slope = std::log10(meijer_g_3013(p, z2).value / meijer_g_3013(p, z1).value);
  CHECK(slope == Approx(1.342).epsilon(1e-3));
}

TEST_CASE("meijer_g_3013 large argument keeps precision") {
  const G3013Params p{1.44, 2.902, 2.51};
  for (double z : {50.0, 400.0, 3000.0}) {
    const MeijerValue g = meijer_g_3013(p, z);
    CHECK(g.value > 0.0);
    CHECK(std::isfinite(g.value));
  }
  CHECK(rel_close(meijer_g_3013(p, 50.0).value, fsorf::testing::meijer_contour(1.44, 2.902, 2.51, 50.0), 1e-7));
}

TEST_CASE("degenerate spacing is perturbed and flagged") {
  const ResolvedG3013 r = resolve_g3013({1.0, 2.0, 2.5});
  CHECK(r.perturbed);
  CHECK(r.params.xi2 == Approx(1.0 + 1e-6).epsilon(1e-15));
  const MeijerValue g = meijer_g_3013({1.0, 2.0, 2.5}, 0.7);
  CHECK(g.perturbed);
  CHECK(rel_close(g.value, fsorf::testing::meijer_contour(1.0, 2.0, 2.5, 0.7), 1e-5));
}

TEST_CASE("functions are pure") {
  const double first = meijer_g_3013({1.44, 2.296, 1.822}, 3.3).value;
  for (int i = 0; i < 3; ++i) CHECK(meijer_g_3013({1.44, 2.296, 1.822}, 3.3).value == first);
  CHECK(hyp2f2(0.4, 1.1, 2.2, 3.3, -7.0) == hyp2f2(0.4, 1.1, 2.2, 3.3, -7.0));
}
