#include "pertlag/numkernel/real.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pertlag {

Real::Real(std::string_view text, Bits prec) {
  mpfr_init2(v_, prec);
  std::string s(text);
  if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

int roundtrip_digits(Bits prec) {
  return static_cast<int>(std::ceil(static_cast<double>(prec) * 0.30102999566398120)) + 1;
}

std::string Real::str(int digits) const {
  if (is_nan()) return "nan";
  if (!is_finite()) return sign() > 0 ? "inf" : "-inf";
  if (digits <= 0) digits = roundtrip_digits(prec());
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

Real make_uninit(Bits prec) { return Real(Real::Uninit{}, prec); }

namespace {

using Unary = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

Real unary(const Real& x, Unary f) {
  Real r = make_uninit(x.prec());
  f(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace

Real pi(Bits prec) {
  Real r = make_uninit(prec);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Real ln2(Bits prec) {
  Real r = make_uninit(prec);
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real cbrt(const Real& x) { return unary(x, mpfr_cbrt); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real expm1(const Real& x) { return unary(x, mpfr_expm1); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real tan(const Real& x) { return unary(x, mpfr_tan); }
Real atan(const Real& x) { return unary(x, mpfr_atan); }
Real sinh(const Real& x) { return unary(x, mpfr_sinh); }
Real cosh(const Real& x) { return unary(x, mpfr_cosh); }
Real tanh(const Real& x) { return unary(x, mpfr_tanh); }

Real floor(const Real& x) {
  Real r = make_uninit(x.prec());
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real round(const Real& x) {
  Real r = make_uninit(x.prec());
  mpfr_round(r.raw(), x.raw());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r = make_uninit(std::max(x.prec(), y.prec()));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Real hypot(const Real& x, const Real& y) {
  Real r = make_uninit(std::max(x.prec(), y.prec()));
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r = make_uninit(std::max(x.prec(), y.prec()));
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long k) {
  Real r = make_uninit(x.prec());
  mpfr_pow_si(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r = make_uninit(x.prec());
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

}  // namespace pertlag
