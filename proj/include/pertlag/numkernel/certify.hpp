#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/scalar.hpp"

namespace pertlag {

// Number of leading decimal digits on which a and b agree, relative to the
// larger magnitude. Exact agreement reports the digits of the precision.
inline int agreement_digits(const Real& a, const Real& b) {
  Bits p = std::min(a.prec(), b.prec());
  Real scale = max(abs(a), abs(b));
  Real d = abs(a - b);
  int cap = static_cast<int>(p * 0.30103);
  if (d.is_zero()) return cap;
  if (scale.is_zero()) return 0;
  double digits = -(log(d / scale) / log(Real(10L, 64))).to_double();
  return std::clamp(static_cast<int>(std::floor(digits)), 0, cap);
}

inline int agreement_digits(const Complex& a, const Complex& b) {
  Bits p = std::min(a.prec(), b.prec());
  Real scale = max(abs(a), abs(b));
  Real d = abs(a - b);
  int cap = static_cast<int>(p * 0.30103);
  if (d.is_zero()) return cap;
  if (scale.is_zero()) return 0;
  double digits = -(log(d / scale) / log(Real(10L, 64))).to_double();
  return std::clamp(static_cast<int>(std::floor(digits)), 0, cap);
}

template <class T>
int agreement_digits(const std::vector<T>& a, const std::vector<T>& b) {
  int d = 1 << 30;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d = std::min(d, agreement_digits(a[i], b[i]));
  return a.empty() ? 0 : d;
}

template <class V>
struct Certified {
  V value;    // result of the higher-precision run
  int digits; // agreement between the two runs
  Bits prec;  // the lower of the two precisions that agreed
};

// Runs compute(P) and compute(2P); if they agree to fewer than `digits`
// digits the precision doubles, up to `cap` bits, then PRECISION_EXHAUSTED.
template <class F>
auto certify(F&& compute, Bits prec, int digits, Bits cap) -> Certified<decltype(compute(prec))> {
  using V = decltype(compute(prec));
  V lo = compute(prec);
  for (;;) {
    V hi = compute(2 * prec);
    int agree = agreement_digits(lo, hi);
    if (agree >= digits) return Certified<V>{std::move(hi), agree, prec};
    if (2 * prec > cap)
      throw NumericError(ErrorCode::PrecisionExhausted,
                         "only " + std::to_string(agree) + " digits at " + std::to_string(2 * prec) + " bits");
    prec *= 2;
    lo = std::move(hi);
  }
}

}  // namespace pertlag
