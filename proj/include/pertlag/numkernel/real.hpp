#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

namespace pertlag {

using Bits = mpfr_prec_t;

// Multiprecision real backed by MPFR. Every value carries its own precision;
// a binary operation rounds to the larger precision of its operands. Values
// built from machine integers and doubles are exact (64 bits), so they never
// drag a computation down.
class Real {
 public:
  static constexpr Bits kExactBits = 64;

  Real() {
    mpfr_init2(v_, kExactBits);
    mpfr_set_zero(v_, 1);
  }
  Real(int v) : Real(static_cast<long>(v)) {}
  Real(long v) {
    mpfr_init2(v_, kExactBits);
    mpfr_set_si(v_, v, MPFR_RNDN);
  }
  Real(long long v) : Real(static_cast<long>(v)) {}
  Real(unsigned v) : Real(static_cast<long>(v)) {}
  Real(unsigned long v) {
    mpfr_init2(v_, kExactBits);
    mpfr_set_ui(v_, v, MPFR_RNDN);
  }
  Real(double v) {
    mpfr_init2(v_, kExactBits);
    mpfr_set_d(v_, v, MPFR_RNDN);
  }
  Real(double v, Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, v, MPFR_RNDN);
  }
  Real(long v, Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, v, MPFR_RNDN);
  }
  Real(int v, Bits prec) : Real(static_cast<long>(v), prec) {}
  Real(unsigned long v, Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set_ui(v_, v, MPFR_RNDN);
  }
  // Correctly rounded decimal parse; throws std::invalid_argument.
  Real(std::string_view text, Bits prec);
  Real(const Real& other, Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  Bits prec() const { return mpfr_get_prec(v_); }
  // Rounds in place to a new precision.
  void set_prec(Bits p) { mpfr_prec_round(v_, p, MPFR_RNDN); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  // Scientific notation with the given number of significant digits;
  // digits == 0 picks enough digits to round-trip at this precision.
  std::string str(int digits = 0) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // Binary exponent e with |x| in [2^(e-1), 2^e); very negative for zero.
  long exponent() const { return is_zero() || !is_finite() ? -(1L << 40) : mpfr_get_exp(v_); }

  Real operator-() const {
    Real r(Uninit{}, prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  Real& operator+=(const Real& b) { return apply(b, mpfr_add); }
  Real& operator-=(const Real& b) { return apply(b, mpfr_sub); }
  Real& operator*=(const Real& b) { return apply(b, mpfr_mul); }
  Real& operator/=(const Real& b) { return apply(b, mpfr_div); }
  Real& operator+=(long b) { mpfr_add_si(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator-=(long b) { mpfr_sub_si(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator*=(long b) { mpfr_mul_si(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator/=(long b) { mpfr_div_si(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator+=(int b) { return *this += static_cast<long>(b); }
  Real& operator-=(int b) { return *this -= static_cast<long>(b); }
  Real& operator*=(int b) { return *this *= static_cast<long>(b); }
  Real& operator/=(int b) { return *this /= static_cast<long>(b); }
  Real& operator+=(double b) { mpfr_add_d(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator-=(double b) { mpfr_sub_d(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator*=(double b) { mpfr_mul_d(v_, v_, b, MPFR_RNDN); return *this; }
  Real& operator/=(double b) { mpfr_div_d(v_, v_, b, MPFR_RNDN); return *this; }

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }

  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator+(Real a, T b) { return a += b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator-(Real a, T b) { return a -= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator*(Real a, T b) { return a *= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator/(Real a, T b) { return a /= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator+(T a, Real b) { return b += a; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator*(T a, Real b) { return b *= a; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator-(T a, Real b) {
    mpfr_neg(b.v_, b.v_, MPFR_RNDN);
    return b += a;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Real operator/(T a, const Real& b) {
    Real r(Uninit{}, b.prec());
    if constexpr (std::is_floating_point_v<T>)
      mpfr_d_div(r.v_, static_cast<double>(a), b.v_, MPFR_RNDN);
    else
      mpfr_si_div(r.v_, static_cast<long>(a), b.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0 && !a.is_nan(); }
  friend std::partial_ordering operator<=>(const Real& a, double b) {
    if (a.is_nan() || b != b) return std::partial_ordering::unordered;
    int c = mpfr_cmp_d(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

 private:
  struct Uninit {};
  Real(Uninit, Bits prec) { mpfr_init2(v_, prec); }

  Real& apply(const Real& b, int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)) {
    if (prec() < b.prec()) mpfr_prec_round(v_, b.prec(), MPFR_RNDN);
    op(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }

  friend Real make_uninit(Bits);

  mpfr_t v_;
};

Real make_uninit(Bits prec);

Real pi(Bits prec);
Real ln2(Bits prec);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real cbrt(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real atan(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real tanh(const Real& x);
Real floor(const Real& x);
Real round(const Real& x);
Real atan2(const Real& y, const Real& x);
Real hypot(const Real& x, const Real& y);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long k);
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

inline bool isfinite(const Real& x) { return x.is_finite(); }
inline bool isnan(const Real& x) { return x.is_nan(); }

// Decimal digits needed to round-trip a value of the given precision.
int roundtrip_digits(Bits prec);

}  // namespace pertlag
