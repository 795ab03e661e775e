#pragma once

#include <functional>
#include <vector>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/lu.hpp"

namespace pertlag {

template <class R>
struct NewtonResult {
  std::vector<R> root;
  R residual;  // max-norm of F at the root
  int iterations = 0;
};

template <class R>
using SystemFn = std::function<std::vector<R>(const std::vector<R>&)>;
template <class R>
using JacobianFn = std::function<Mat<R>(const std::vector<R>&)>;

template <class R>
R max_norm(const std::vector<R>& v) {
  using std::abs;
  R m = abs(v.front());
  for (const auto& x : v)
    if (abs(x) > m) m = abs(x);
  return m;
}

// Forward-difference Jacobian with steps scaled to sqrt(eps) * max(1, |x_j|).
template <class R>
Mat<R> fd_jacobian(const SystemFn<R>& F, const std::vector<R>& x, const std::vector<R>& fx, Bits prec) {
  using std::abs;
  using std::sqrt;
  const int n = static_cast<int>(x.size());
  Mat<R> J(n, n);
  const R root_eps = sqrt(Num<R>::eps(prec));
  for (int j = 0; j < n; ++j) {
    R scale = abs(x[j]);
    if (scale < 1.0) scale = lift<R>(1.0, prec);
    R h = root_eps * scale;
    std::vector<R> xp = x;
    xp[j] += h;
    std::vector<R> fp = F(xp);
    for (int i = 0; i < n; ++i) J(i, j) = (fp[i] - fx[i]) / h;
  }
  return J;
}

// Damped Newton iteration. Throws DIVERGED after max_iter without meeting
// tol, SINGULAR_JACOBIAN if the linearisation cannot be solved.
template <class R>
NewtonResult<R> newton_solve(const SystemFn<R>& F, std::vector<R> x, const R& tol, int max_iter = 60,
                             const JacobianFn<R>& jac = nullptr) {
  using std::abs;
  const Bits prec = Num<R>::bits(tol);
  const int n = static_cast<int>(x.size());
  std::vector<R> fx = F(x);
  R res = max_norm(fx);
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) return {x, res, it};
    Mat<R> J = jac ? jac(x) : fd_jacobian<R>(F, x, fx, prec);
    R floor = Num<R>::eps(prec) * lift<R>(1e-6, prec);
    auto lu = lu_factor<R>(J, floor);
    if (lu.singular_at) throw NumericError(ErrorCode::SingularJacobian, "Jacobian pivot vanished");
    Vec<R> rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = -fx[i];
    Vec<R> dx = lu_solve(lu, rhs);
    // Backtrack until the residual decreases.
    R lambda = lift<R>(1.0, prec);
    for (int bt = 0; bt < 30; ++bt) {
      std::vector<R> xn = x;
      for (int i = 0; i < n; ++i) xn[i] += lambda * dx(i);
      std::vector<R> fn = F(xn);
      R rn = max_norm(fn);
      if (rn < res || bt == 29) {
        x = std::move(xn);
        fx = std::move(fn);
        res = rn;
        break;
      }
      lambda /= 2;
    }
  }
  if (res <= tol) return {x, res, max_iter};
  throw NumericError(ErrorCode::Diverged, "Newton iteration did not reach tolerance");
}

}  // namespace pertlag
