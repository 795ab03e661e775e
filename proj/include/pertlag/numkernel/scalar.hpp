#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "pertlag/numkernel/complex.hpp"

// Uniform access to machine and multiprecision scalars so the numeric
// kernels can be written once as templates.
namespace pertlag {

template <class R>
struct Num;

template <>
struct Num<double> {
  using Complex = std::complex<double>;
  static double make(double v, Bits) { return v; }
  static double parse(std::string_view s, Bits) { return std::stod(std::string(s)); }
  static Bits bits(double) { return 53; }
  static Bits bits(const Complex&) { return 53; }
  static double pi(Bits) { return 3.14159265358979323846; }
  static double eps(Bits) { return 0x1p-52; }
  static double to_double(double x) { return x; }
  static std::string str(double x, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return buf;
  }
  static double ldexp(double x, long e) { return std::ldexp(x, static_cast<int>(e)); }
  static long exponent(double x) { return x == 0 ? -(1L << 40) : std::ilogb(x) + 1; }
};

template <>
struct Num<Real> {
  using Complex = pertlag::Complex;
  static Real make(double v, Bits p) { return Real(v, p); }
  static Real parse(std::string_view s, Bits p) { return Real(s, p); }
  static Bits bits(const Real& x) { return x.prec(); }
  static Bits bits(const Complex& z) { return z.prec(); }
  static Real pi(Bits p) { return pertlag::pi(p); }
  static Real eps(Bits p) { return pertlag::ldexp(Real(1L, p), -(p - 1)); }
  static double to_double(const Real& x) { return x.to_double(); }
  static std::string str(const Real& x, int digits = 0) { return x.str(digits); }
  static Real ldexp(const Real& x, long e) { return pertlag::ldexp(x, e); }
  static long exponent(const Real& x) { return x.exponent(); }
};

template <class R>
using complex_of = typename Num<R>::Complex;

// Lifts a double to R at the given precision.
template <class R>
R lift(double v, Bits p) {
  return Num<R>::make(v, p);
}

template <class R>
complex_of<R> lift_c(double re, double im, Bits p) {
  return complex_of<R>(Num<R>::make(re, p), Num<R>::make(im, p));
}

}  // namespace pertlag

namespace Eigen {

template <>
struct NumTraits<pertlag::Real> : GenericNumTraits<pertlag::Real> {
  using Real = pertlag::Real;
  using NonInteger = pertlag::Real;
  using Nested = pertlag::Real;
  using Literal = pertlag::Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 30,
    MulCost = 60
  };
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<pertlag::Complex> : GenericNumTraits<pertlag::Complex> {
  using Real = pertlag::Real;
  using NonInteger = pertlag::Complex;
  using Nested = pertlag::Complex;
  using Literal = pertlag::Complex;
  enum {
    IsComplex = 1,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 40,
    AddCost = 60,
    MulCost = 240
  };
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
