#pragma once

#include <functional>
#include <vector>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/scalar.hpp"

namespace pertlag {

enum class Stencil { ThreePoint, FivePoint };

template <class T, class R>
struct DiffResult {
  T value;
  R err;
};

// Default step 2^{-P/4} for precision P.
template <class R>
R default_fd_step(Bits prec) {
  return Num<R>::ldexp(lift<R>(1.0, prec), -static_cast<long>(prec / 4));
}

namespace fd_detail {

template <class T, class R>
T central(const std::function<T(const R&)>& g, const R& x, int order, const R& h, Stencil st, const T& gx) {
  if (st == Stencil::ThreePoint) {
    T gp = g(x + h), gm = g(x - h);
    if (order == 1) return (gp - gm) / (h * 2);
    return (gp - gx * 2 + gm) / (h * h);
  }
  T gp = g(x + h), gm = g(x - h), gp2 = g(x + h * 2), gm2 = g(x - h * 2);
  if (order == 1) return (gm2 - gm * 8 + gp * 8 - gp2) / (h * 12);
  return (-gm2 + gm * 16 - gx * 30 + gp * 16 - gp2) / (h * h * 12);
}

}  // namespace fd_detail

// Central difference of order 1 or 2 with `levels` Richardson
// extrapolations over steps h, h/2, ..., h/2^levels. The error estimate is
// the change made by the last extrapolation. g may throw; the error is
// rethrown as EVALUATION_FAILED.
template <class T, class R>
DiffResult<T, R> finite_diff(const std::function<T(const R&)>& g, const R& x, int order, const R& h,
                             Stencil st = Stencil::ThreePoint, int levels = 2) {
  using std::abs;
  if (order != 1 && order != 2) throw NumericError(ErrorCode::Domain, "finite_diff supports orders 1 and 2");
  try {
    const T gx = g(x);
    const int base = st == Stencil::ThreePoint ? 2 : 4;
    std::vector<std::vector<T>> table(levels + 1);
    R step = h;
    for (int i = 0; i <= levels; ++i) {
      table[i].push_back(fd_detail::central<T, R>(g, x, order, step, st, gx));
      for (int j = 1; j <= i; ++j) {
        double factor = std::pow(2.0, base + 2 * (j - 1));
        table[i].push_back(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0));
      }
      step = step / 2;
    }
    T best = table[levels][levels];
    R err = levels > 0 ? R(abs(best - table[levels][levels - 1])) : R(abs(best - best));
    return {best, err};
  } catch (const NumericError& e) {
    throw NumericError(ErrorCode::EvaluationFailed, e.what());
  }
}

}  // namespace pertlag
