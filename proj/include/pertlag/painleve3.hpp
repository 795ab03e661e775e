#pragma once

#include <vector>

#include <Eigen/Core>

#include "pertlag/numkernel/finite_diff.hpp"
#include "pertlag/numkernel/taylor_ode.hpp"
#include "pertlag/orthopoly.hpp"

namespace pertlag {

// a'' = a'^2/a - a'/t + n(2k+1+n) a^2/t^2 + n^2 a^3/t^2 + n^2/t - n^2/a
struct P3Params {
  int k = 0;
  int n = 1;

  void validate() const;
  long theta0() const { return n; }
  long theta_inf() const { return -(2L * k + n); }
  // n i sqrt(-t) with the principal root: real for t > 0, imaginary for t < 0.
  Complex s_of(const Real& t) const;
};

// Right-hand side a'' of the ODE.
Complex p3_rhs(const P3Params& par, const Real& t, const Complex& a, const Complex& da);

// |a'' - rhs| over the largest term of the equation.
Real p3_residual(const P3Params& par, const Real& t, const Complex& a, const Complex& da, const Complex& dda);

// Generalized series about t = 0 with a(0) = 0, a'(0) = 1:
//   a(t) = t (1 + sum_{m>=1} t^m E_m(L)),  L = log|t|,
// E_m a polynomial in L. Order n is resonant: the constant term of E_n
// (the t^{n+1} coefficient of a) is free and must be supplied.
struct P3Series {
  P3Params par;
  Complex resonant;
  std::vector<std::vector<Complex>> e;  // e[m][l], m = 0..order, e[0] unused

  int order() const { return static_cast<int>(e.size()) - 1; }
  Complex a(const Real& t) const;
  Complex da(const Real& t) const;
  // Size of the last two retained terms of a at t.
  Real tail(const Real& t) const;
};

// Throws SERIES_LAUNCH_FAILED if the coefficient recurrence breaks down.
P3Series p3_series(const P3Params& par, const Complex& resonant, int order, Bits prec);

struct P3Trajectory {
  P3Series series;
  Real t_launch;          // series used for |t| <= |t_launch|
  SolutionGrid<Real> grid;  // components Re a, Im a, Re a', Im a'
  Real max_step_residual;   // plug-back ODE residual at step midpoints

  Complex a(const Real& t) const;
  Complex da(const Real& t) const;
};

// Series launch from 0 to a small t0 (last term below 2^{16-P}), then Taylor
// continuation to t_end in either direction. Throws POLE_ENCOUNTERED or
// STEP_UNDERFLOW if the continuation cannot reach t_end.
P3Trajectory p3_solve(const P3Params& par, const Complex& resonant, const Real& t_end, Bits prec);

// The resonant coefficient that makes the launched solution pass through
// a_target at t_anchor (secant iteration).
Complex fit_resonant(const P3Params& par, const Real& t_anchor, const Complex& a_target, Bits prec);

// a_{k,n}(t) from a recurrence table, and its t-derivatives by differences
// over fresh moment tables.
struct HankelA {
  Complex a, da, dda;
};
Complex hankel_a_value(int k, const WeightParams& p, Bits prec);
HankelA hankel_a(int k, const WeightParams& p, Bits prec, const Real& h, Stencil st, int levels);
HankelA hankel_a(int k, const WeightParams& p, Bits prec);

struct P3VerifyPoint {
  Real t;
  Complex a_hankel, a_ode;
  Real deviation;         // |a_hankel - a_ode|
  Real hankel_residual;   // ODE residual of a_hankel with difference derivatives
  Complex a_over_t;
};

struct P3VerifyReport {
  int k = 0, n = 0;
  Real anchor;
  Complex resonant;
  std::vector<P3VerifyPoint> points;
  Real max_deviation, max_hankel_residual, max_step_residual;
};

// Fits the resonant coefficient at `anchor`, then compares on the grid.
P3VerifyReport p3_verify(int k, const WeightParams& base, const std::vector<Real>& grid, const Real& anchor,
                         Bits prec);

struct UTransformPoint {
  Real t;
  Complex s, u, du, ddu;
  Real residual;   // standard PIII residual in s, relative to its largest term
  Real roundtrip;  // |a rebuilt from u - a| / |a|
};

// u(s) = -n t / (s a) with s^2 = n^2 t; s-derivatives by the chain rule from
// difference t-derivatives. Throws DIVISION_NEAR_ZERO when |a| is tiny.
UTransformPoint u_transform_check(int k, const WeightParams& p, Bits prec, const Real& h, Stencil st, int levels);
UTransformPoint u_transform_check(int k, const WeightParams& p, Bits prec);

// |n^2 beta - n^2 t c q + H - k(k+n)| / (1 + |n^2 beta|); rejects k = 0.
Real first_integral_check(int k, const WeightParams& p, Bits prec);

using Mat2 = Eigen::Matrix<Complex, 2, 2>;

struct LaxReport {
  Complex s;
  Mat2 a_m1, a_m2;
  Real trace_a_m1;
  Real det_residual;              // |det A_{-2} - s^2/4| / |s^2/4|
  std::vector<Real> lax_residual;  // per sample: |Phi' Phi^{-1} - A| / max(1, |A|)
};

// Assembles the 1/lambda and 1/lambda^2 coefficients of the lambda-equation
// and, for each sample lambda, compares them with a difference quotient of
// the scaled RH solution.
LaxReport lax_check(int k, const WeightParams& p, const std::vector<Complex>& lambdas, Bits prec);

}  // namespace pertlag
