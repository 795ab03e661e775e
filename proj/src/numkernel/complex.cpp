#include "pertlag/numkernel/complex.hpp"

namespace pertlag {

Complex sqrt(const Complex& z) {
  const Bits p = z.prec();
  if (z.imag().is_zero()) {
    if (z.real().sign() >= 0) return {sqrt(z.real()), Real(0L, p)};
    return {Real(0L, p), sqrt(-z.real())};
  }
  Real r = abs(z);
  Real u = sqrt((r + abs(z.real())) / 2);
  if (z.real().sign() >= 0) return {u, z.imag() / (2 * u)};
  Real v = z.imag().sign() >= 0 ? u : -u;
  return {abs(z.imag()) / (2 * u), v};
}

Complex pow(const Complex& z, long k) {
  if (k < 0) return Complex(Real(1L, z.prec())) / pow(z, -k);
  Complex result(Real(1L, z.prec()), Real(0L, z.prec()));
  Complex base = z;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k > 0) base *= base;
  }
  return result;
}

Complex pow(const Complex& z, const Real& p) {
  if (z.real().is_zero() && z.imag().is_zero()) return Complex(Real(0L, std::max(z.prec(), p.prec())));
  Complex l = log(z);
  return exp(l * p);
}

Complex pow(const Complex& z, const Complex& p) {
  if (z.real().is_zero() && z.imag().is_zero()) return Complex(Real(0L, std::max(z.prec(), p.prec())));
  return exp(log(z) * p);
}

}  // namespace pertlag
