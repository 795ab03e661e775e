#pragma once

#include <algorithm>
#include <string>

#include "pertlag/numkernel/real.hpp"

namespace pertlag {

// Complex number over Real, with the same precision-propagation rule.
class Complex {
 public:
  Complex() = default;
  Complex(Real re) : re_(std::move(re)) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  Complex(int re) : re_(re) {}
  Complex(long re) : re_(re) {}
  Complex(double re) : re_(re) {}
  Complex(double re, double im, Bits prec) : re_(re, prec), im_(im, prec) {}

  const Real& real() const { return re_; }
  const Real& imag() const { return im_; }
  Real& real() { return re_; }
  Real& imag() { return im_; }
  Bits prec() const { return std::max(re_.prec(), im_.prec()); }
  void set_prec(Bits p) {
    re_.set_prec(p);
    im_.set_prec(p);
  }
  bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

  Complex operator-() const { return {-re_, -im_}; }

  Complex& operator+=(const Complex& b) {
    re_ += b.re_;
    im_ += b.im_;
    return *this;
  }
  Complex& operator-=(const Complex& b) {
    re_ -= b.re_;
    im_ -= b.im_;
    return *this;
  }
  Complex& operator*=(const Complex& b) {
    if (b.im_.is_zero()) return *this *= b.re_;
    Real r = re_ * b.re_ - im_ * b.im_;
    im_ = re_ * b.im_ + im_ * b.re_;
    re_ = std::move(r);
    return *this;
  }
  Complex& operator/=(const Complex& b) {
    if (b.im_.is_zero()) return *this /= b.re_;
    // Smith's scaling avoids overflow when one part dominates.
    if (abs(b.re_) >= abs(b.im_)) {
      Real r = b.im_ / b.re_;
      Real d = b.re_ + b.im_ * r;
      Real x = (re_ + im_ * r) / d;
      im_ = (im_ - re_ * r) / d;
      re_ = std::move(x);
    } else {
      Real r = b.re_ / b.im_;
      Real d = b.re_ * r + b.im_;
      Real x = (re_ * r + im_) / d;
      im_ = (im_ * r - re_) / d;
      re_ = std::move(x);
    }
    return *this;
  }
  Complex& operator*=(const Real& b) {
    re_ *= b;
    im_ *= b;
    return *this;
  }
  Complex& operator/=(const Real& b) {
    re_ /= b;
    im_ /= b;
    return *this;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  Complex& operator*=(T b) {
    re_ *= b;
    im_ *= b;
    return *this;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  Complex& operator/=(T b) {
    re_ /= b;
    im_ /= b;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const Real& b) { return a *= b; }
  friend Complex operator*(const Real& b, Complex a) { return a *= b; }
  friend Complex operator/(Complex a, const Real& b) { return a /= b; }
  friend Complex operator+(Complex a, const Real& b) {
    a.re_ += b;
    return a;
  }
  friend Complex operator+(const Real& b, Complex a) {
    a.re_ += b;
    return a;
  }
  friend Complex operator-(Complex a, const Real& b) {
    a.re_ -= b;
    return a;
  }
  friend Complex operator-(const Real& b, const Complex& a) { return Complex(b - a.re_, -a.im_); }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator*(Complex a, T b) { return a *= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator*(T b, Complex a) { return a *= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator/(Complex a, T b) { return a /= b; }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator+(Complex a, T b) {
    a.re_ += b;
    return a;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator+(T b, Complex a) {
    a.re_ += b;
    return a;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator-(Complex a, T b) {
    a.re_ -= b;
    return a;
  }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator-(T b, const Complex& a) { return Complex(b - a.re_, -a.im_); }
  template <class T>
    requires std::is_arithmetic_v<T>
  friend Complex operator/(T b, const Complex& a) {
    return Complex(Real(b, a.prec())) / a;
  }
  friend Complex operator/(const Real& b, const Complex& a) { return Complex(b) / a; }

  friend bool operator==(const Complex& a, const Complex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

 private:
  Real re_;
  Real im_;
};

inline const Real& real(const Complex& z) { return z.real(); }
inline const Real& imag(const Complex& z) { return z.imag(); }
inline Complex conj(const Complex& z) { return {z.real(), -z.imag()}; }
inline Real norm(const Complex& z) { return z.real() * z.real() + z.imag() * z.imag(); }
inline Real abs(const Complex& z) { return hypot(z.real(), z.imag()); }
inline Real arg(const Complex& z) { return atan2(z.imag(), z.real()); }
inline Complex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }
inline Complex exp(const Complex& z) {
  Real m = exp(z.real());
  if (z.imag().is_zero()) return {m, Real(0L, m.prec())};
  return {m * cos(z.imag()), m * sin(z.imag())};
}
// Principal branch: imaginary part in (-pi, pi].
inline Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }
// Principal branch, cut along the negative real axis.
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long k);
// Principal branch z^p = exp(p log z).
Complex pow(const Complex& z, const Real& p);
Complex pow(const Complex& z, const Complex& p);
inline bool isfinite(const Complex& z) { return z.is_finite(); }

inline Complex imag_unit(Bits prec) { return {Real(0L, prec), Real(1L, prec)}; }

}  // namespace pertlag
