#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace naesat {

// Binary floating point with a runtime mantissa width. New values take the
// thread's current default width; copies keep the width of their source.
class Real {
 public:
  Real();
  Real(double x);  // NOLINT(google-explicit-constructor)
  Real(int x);     // NOLINT(google-explicit-constructor)
  Real(long x);    // NOLINT(google-explicit-constructor)
  Real(long long x);  // NOLINT(google-explicit-constructor)
  Real(unsigned long x);  // NOLINT(google-explicit-constructor)
  Real(unsigned long long x);  // NOLINT(google-explicit-constructor)
  explicit Real(std::string_view decimal);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  static long default_bits();
  static void set_default_bits(long bits);

  long bits() const { return static_cast<long>(mpfr_get_prec(v_)); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  double to_double() const;
  bool is_finite() const;
  bool is_zero() const;
  int sign() const;

  // Scientific notation with the given number of significant digits; 0 means
  // enough digits to round-trip the mantissa.
  std::string str(int digits = 0) const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
  bool moved_ = false;
};

std::ostream& operator<<(std::ostream& os, const Real& x);

Real exp(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real expm1(const Real& x);
Real sqrt(const Real& x);
Real abs(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real floor(const Real& x);
Real round(const Real& x);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real ldexp(const Real& x, long e);
Real const_log2();
Real const_pi();

// x^y for x in [0,1] and real y ≥ 0 via exp(y log x); 0^0 = 1.
Real pow_unit(const Real& x, const Real& y);

// Sets the default mantissa width for the enclosing scope.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(long bits);
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;
  ~PrecisionGuard();

 private:
  long saved_;
};

}  // namespace naesat
