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

#include "fsorf/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsorf::specfun {

namespace {

mpfr_prec_t clamp_bits(long bits) {
  return static_cast<mpfr_prec_t>(std::clamp<long>(bits, MPFR_PREC_MIN, 1L << 20));
}

long wider(const BigFloat& a, const BigFloat& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

BigFloat::BigFloat(long bits) {
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double value, long bits) {
  mpfr_init2(v_, clamp_bits(bits));
  mpfr_set_d(v_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat& BigFloat::operator=(double value) {
  mpfr_set_d(v_, value, MPFR_RNDN);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

double BigFloat::log2_abs() const {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long exponent = 0;
  const double mantissa = mpfr_get_d_2exp(&exponent, v_, MPFR_RNDN);
  return std::log2(std::fabs(mantissa)) + static_cast<double>(exponent);
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(rhs.v_), MPFR_RNDN);
  mpfr_add(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(rhs.v_), MPFR_RNDN);
  mpfr_sub(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(rhs.v_), MPFR_RNDN);
  mpfr_mul(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(rhs.v_), MPFR_RNDN);
  mpfr_div(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator+=(double rhs) {
  mpfr_add_d(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(double rhs) {
  mpfr_sub_d(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(double rhs) {
  mpfr_mul_d(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(double rhs) {
  mpfr_div_d(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::fma_add(const BigFloat& a, const BigFloat& b) {
  mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN);
  return *this;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(wider(a, b));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(wider(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(wider(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat r(wider(a, b));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, double b) {
  BigFloat r(a.precision());
  mpfr_mul_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, double b) {
  BigFloat r(a.precision());
  mpfr_div_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

BigFloat operator+(const BigFloat& a, double b) {
  BigFloat r(a.precision());
  mpfr_add_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a, double b) {
  BigFloat r(a.precision());
  mpfr_sub_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_neg(r.get(), a.get(), MPFR_RNDN);
  return r;
}

bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.get(), b.get()) != 0; }

BigFloat abs(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat exp(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat log(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat sqrt(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat sin(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_sin(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& base, const BigFloat& exponent) {
  BigFloat r(wider(base, exponent));
  mpfr_pow(r.get(), base.get(), exponent.get(), MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& base, double exponent) {
  return pow(base, BigFloat(exponent, base.precision()));
}

BigFloat gamma(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_gamma(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigFloat lngamma(const BigFloat& x, int* sign) {
  BigFloat r(x.precision());
  int s = 1;
  mpfr_lgamma(r.get(), &s, x.get(), MPFR_RNDN);
  if (sign != nullptr) *sign = s;
  return r;
}

BigFloat pi(long bits) {
  BigFloat r(bits);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

}  // namespace fsorf::specfun
