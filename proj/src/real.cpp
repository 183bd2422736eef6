#include "naesat/real.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace naesat {

namespace {

thread_local long g_default_bits = 128;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

// Powers like v^d with d near 2^k k leave the default exponent range.
void init_value(mpfr_ptr v, mpfr_prec_t bits) {
  thread_local bool widened = [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    return true;
  }();
  (void)widened;
  mpfr_init2(v, bits);
}

}  // namespace

long Real::default_bits() { return g_default_bits; }

void Real::set_default_bits(long bits) {
  if (bits < MPFR_PREC_MIN || bits > 1'000'000) {
    throw std::invalid_argument("precision bits out of range: " + std::to_string(bits));
  }
  g_default_bits = bits;
}

Real::Real() {
  init_value(v_, g_default_bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(double x) {
  init_value(v_, g_default_bits);
  mpfr_set_d(v_, x, kRnd);
}

Real::Real(int x) : Real(static_cast<long>(x)) {}

Real::Real(long x) {
  init_value(v_, g_default_bits);
  mpfr_set_si(v_, x, kRnd);
}

Real::Real(long long x) : Real(static_cast<long>(x)) {}

Real::Real(unsigned long x) {
  init_value(v_, g_default_bits);
  mpfr_set_ui(v_, x, kRnd);
}

Real::Real(unsigned long long x) : Real(static_cast<unsigned long>(x)) {}

Real::Real(std::string_view decimal) {
  init_value(v_, g_default_bits);
  std::string s(decimal);
  if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

Real::Real(const Real& other) {
  init_value(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, kRnd);
}

Real::Real(Real&& other) noexcept {
  // Steal the limbs; the source is left holding nothing and must not clear.
  *v_ = *other.v_;
  other.moved_ = true;
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (moved_) {
      init_value(v_, mpfr_get_prec(other.v_));
      moved_ = false;
    } else {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    }
    mpfr_set(v_, other.v_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) {
    if (!moved_) mpfr_clear(v_);
    *v_ = *other.v_;
    moved_ = false;
    other.moved_ = true;
  }
  return *this;
}

Real::~Real() {
  if (!moved_) mpfr_clear(v_);
}

Real& Real::operator+=(const Real& o) {
  mpfr_add(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  mpfr_sub(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  mpfr_mul(v_, v_, o.v_, kRnd);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  mpfr_div(v_, v_, o.v_, kRnd);
  return *this;
}

Real Real::operator-() const {
  Real r;
  mpfr_neg(r.v_, v_, kRnd);
  return r;
}

Real operator+(const Real& a, const Real& b) {
  Real r;
  mpfr_add(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r;
  mpfr_sub(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r;
  mpfr_mul(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r;
  mpfr_div(r.v_, a.v_, b.v_, kRnd);
  return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

double Real::to_double() const { return mpfr_get_d(v_, kRnd); }

bool Real::is_finite() const { return mpfr_number_p(v_) != 0; }

bool Real::is_zero() const { return mpfr_zero_p(v_) != 0; }

int Real::sign() const { return mpfr_sgn(v_); }

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return "0";
  size_t n = digits > 0 ? static_cast<size_t>(digits)
                        : static_cast<size_t>(std::ceil(static_cast<double>(bits()) * 0.30102999566398120)) + 1;
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, n, v_, kRnd);
  std::string m(raw);
  mpfr_free_str(raw);
  std::string out;
  size_t pos = 0;
  if (m[0] == '-') {
    out += '-';
    pos = 1;
  }
  out += m[pos];
  if (m.size() > pos + 1) {
    out += '.';
    out.append(m, pos + 1, std::string::npos);
  }
  out += 'e';
  out += std::to_string(static_cast<long>(e) - 1);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

Real exp(const Real& x) {
  Real r;
  mpfr_exp(r.get(), x.get(), kRnd);
  return r;
}

Real log(const Real& x) {
  Real r;
  mpfr_log(r.get(), x.get(), kRnd);
  return r;
}

Real log1p(const Real& x) {
  Real r;
  mpfr_log1p(r.get(), x.get(), kRnd);
  return r;
}

Real expm1(const Real& x) {
  Real r;
  mpfr_expm1(r.get(), x.get(), kRnd);
  return r;
}

Real sqrt(const Real& x) {
  Real r;
  mpfr_sqrt(r.get(), x.get(), kRnd);
  return r;
}

Real abs(const Real& x) {
  Real r;
  mpfr_abs(r.get(), x.get(), kRnd);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.get(), x.get(), y.get(), kRnd);
  return r;
}

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.get(), x.get(), n, kRnd);
  return r;
}

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.get(), x.get());
  return r;
}

Real round(const Real& x) {
  Real r;
  mpfr_round(r.get(), x.get());
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.get(), x.get(), e, kRnd);
  return r;
}

Real const_log2() {
  Real r;
  mpfr_const_log2(r.get(), kRnd);
  return r;
}

Real const_pi() {
  Real r;
  mpfr_const_pi(r.get(), kRnd);
  return r;
}

Real pow_unit(const Real& x, const Real& y) {
  if (x.sign() < 0 || x > Real(1)) throw std::domain_error("pow_unit: base outside [0,1]");
  if (y.sign() < 0) throw std::domain_error("pow_unit: negative exponent");
  if (y.is_zero()) return Real(1);
  if (x.is_zero()) return Real(0);
  return exp(y * log(x));
}

PrecisionGuard::PrecisionGuard(long bits) : saved_(Real::default_bits()) { Real::set_default_bits(bits); }

PrecisionGuard::~PrecisionGuard() { g_default_bits = saved_; }

}  // namespace naesat
