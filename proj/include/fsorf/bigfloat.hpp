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

#include <mpfr.h>

namespace fsorf::specfun {

// Owning wrapper around an MPFR value. Each value carries its own precision in
// bits; binary operations produce the larger of the two operand precisions.
class BigFloat {
 public:
  explicit BigFloat(long bits = 128);
  BigFloat(double value, long bits);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  BigFloat& operator=(double value);
  ~BigFloat();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Approximate log2|x|; -inf for zero.
  double log2_abs() const;

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator+=(double rhs);
  BigFloat& operator-=(double rhs);
  BigFloat& operator*=(double rhs);
  BigFloat& operator/=(double rhs);

  // this += a * b, rounded once per step.
  BigFloat& fma_add(const BigFloat& a, const BigFloat& b);

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

BigFloat operator+(const BigFloat& a, const BigFloat& b);
BigFloat operator-(const BigFloat& a, const BigFloat& b);
BigFloat operator*(const BigFloat& a, const BigFloat& b);
BigFloat operator/(const BigFloat& a, const BigFloat& b);
BigFloat operator*(const BigFloat& a, double b);
BigFloat operator/(const BigFloat& a, double b);
BigFloat operator+(const BigFloat& a, double b);
BigFloat operator-(const BigFloat& a, double b);
BigFloat operator-(const BigFloat& a);
bool operator<(const BigFloat& a, const BigFloat& b);

BigFloat abs(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat pow(const BigFloat& base, const BigFloat& exponent);
BigFloat pow(const BigFloat& base, double exponent);
BigFloat gamma(const BigFloat& x);
// ln|Γ(x)|; the sign of Γ(x) is written to *sign when non-null.
BigFloat lngamma(const BigFloat& x, int* sign = nullptr);
BigFloat pi(long bits);

}  // namespace fsorf::specfun
