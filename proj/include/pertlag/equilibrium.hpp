#pragma once

#include <string>
#include <vector>

#include "pertlag/numkernel/complex.hpp"
#include "pertlag/numkernel/real.hpp"

namespace pertlag {

// Potential V_t(x) = x - log x + t / x.
Real potential(const Real& x, const Real& t);

struct CriticalConstants {
  Real t_cr, a_cr, b_cr;
};

CriticalConstants critical_constants(Bits prec);

// Support [a, b] of the positive equilibrium measure, c = t / sqrt(ab).
struct EquilibriumData {
  Real t, a, b, c;
  Real residual;         // max-norm of the two endpoint equations
  bool positive = true;  // a + c >= 0, i.e. the density is nonnegative
};

// Newton on the endpoint system with continuation from t = 0. The positive
// branch ends in a fold at t_cr, so below it Newton throws DIVERGED.
EquilibriumData solve_endpoints(const Real& t, Bits prec);

// Signed measure on [a_cr, b] for t near t_cr.
struct SignedMeasureData {
  Real t, b, d0, d1;
  Real residual;
};

SignedMeasureData solve_signed(const Real& t, Bits prec);

enum class DensityMode { Regular, Signed, Critical };

Real regular_density(const EquilibriumData& e, const Real& x);
Real signed_density(const SignedMeasureData& s, const CriticalConstants& cc, const Real& x);
Real critical_density(const CriticalConstants& cc, const Real& x);

// Throws DOMAIN outside the support of the chosen mode.
Real density(const Real& x, const Real& t, DensityMode mode, Bits prec);

// Total mass by quadrature in the variable x = left + (right - left) sin^2.
Real density_mass(const Real& t, DensityMode mode, Bits prec);

// g(z) = int log(z - s) psi_t(s) ds over [a_cr, b] for the signed measure.
class GFunction {
 public:
  GFunction(SignedMeasureData sd, CriticalConstants cc, Bits prec);

  // Principal log; z off (-inf, b].
  Complex operator()(const Complex& z) const;
  // g'(z) = int psi_t(s) / (z - s) ds.
  Complex derivative(const Complex& z) const;
  // int log|x - s| psi_t(s) ds for real x > 0, the mean of the two boundary values of g.
  Real log_potential(const Real& x) const;
  // g_+ + g_- - V_t - l at real x; zero on the support.
  Real euler_lagrange(const Real& x, const Real& l) const;

  const SignedMeasureData& data() const { return sd_; }
  const CriticalConstants& constants() const { return cc_; }

 private:
  SignedMeasureData sd_;
  CriticalConstants cc_;
  Bits prec_;
};

struct GAndL {
  GFunction g;
  Real l;                          // from x = (a_cr + b) / 2
  std::vector<Real> sample_x;      // five interior points
  std::vector<Real> sample_l;      // 2 log_potential - V_t at each
  Real spread;                     // max |sample_l - l|
};

GAndL g_and_l(const Real& t, Bits prec);

// For points on the real axis right of a_cr, which boundary value to take.
enum class Side { Upper, Lower };

// phi_t, phi_cr, phi_0 = (phi_t - phi_cr) / (t - t_cr), the conformal map f
// near a_cr, q and the scaling variable. Square roots of s - a_cr and s - b
// use arguments in (0, 2 pi); the phi-functions are defined off
// (-inf, 0] and continued to (a_cr, inf) through the chosen side.
class PhiMaps {
 public:
  PhiMaps(const Real& t, Bits prec);

  Complex phi_t(const Complex& z, Side side = Side::Upper) const;
  Complex phi_cr(const Complex& z, Side side = Side::Upper) const;
  // Throws DOMAIN at t = t_cr.
  Complex phi_0(const Complex& z, Side side = Side::Upper) const;

  // f(z)^{5/2} = -(5/4) phi_cr(z), with f real and decreasing through a_cr.
  // Meant for a neighbourhood of a_cr off the cut.
  Complex f(const Complex& z) const;
  // -(phi_t - phi_cr) / f^{1/2}, principal root; the limit at a_cr.
  Complex q(const Complex& z) const;
  Real q_at_a() const;
  // n^{4/5} q(a_cr).
  Real s_star(int n) const;

  // phi_cr / [ (b_cr - a_cr)^{1/2} (z - a_cr)^{5/2} i / (5 a_cr^2) ].
  Complex phi_cr_local_ratio(const Complex& z) const;
  // phi_0 / [ -i sqrt(b_cr - a_cr) / (2 a_cr sqrt(a_cr b_cr)) sqrt(z - a_cr) ].
  Complex phi_0_local_ratio(const Complex& z) const;
  // |theta(n^{2/5} f, n^{4/5} q) + n phi_t| / (1 + |n phi_t|).
  Real theta_relation_residual(const Complex& z, int n) const;

  const Real& t() const { return t_; }
  const SignedMeasureData& signed_data() const { return sd_; }
  const CriticalConstants& constants() const { return cc_; }
  Bits prec() const { return prec_; }

 private:
  Complex phi_generic(const Complex& z, Side side, const Real& b, const Real& e1, const Real& e0) const;
  // phi_cr / (z - a_cr)^{5/2} on the segment, no cancellation near a_cr.
  Complex phi_cr_reduced(const Complex& z) const;

  Real t_;
  Bits prec_;
  CriticalConstants cc_;
  SignedMeasureData sd_;
  Real e1_, e0_;  // psi numerator as w^2 + e1 w + e0 in w = s - a_cr
  Real f_scale_;  // (b_cr - a_cr)^{1/5} (2 a_cr)^{-4/5}
};

// theta(zeta, s) = (4/5) zeta^{5/2} + s zeta^{1/2}, principal roots.
Complex theta_phase(const Complex& zeta, const Complex& s);

struct SignCell {
  Real x, y;
  int sign;  // sign of Re phi_t
};

struct SignGridSpec {
  double x_min = -0.5, x_max = 8.0;
  double y_max = 3.0;
  int nx = 60, ny = 30;
  // Spacing parameter of the sinh stretch that clusters nodes at a_cr and on
  // the real axis; 0 gives a uniform grid.
  double stretch = 6.0;
};

struct SignRegionReport {
  Real t;
  std::vector<SignCell> cells;
  std::vector<std::string> failures;  // one line per violated assertion
  int checks = 0;
  Real theta_residual;                // largest over the samples near a_cr

  bool ok() const { return failures.empty(); }
  std::string csv() const;
};

// Classifies sign(Re phi_t) on the grid and checks the sign pattern used by
// the steepest descent argument: positive on the circle through 0 and a_cr
// and right of b, negative just off (a_cr, b), Re phi_cr increasing along the
// circle away from a_cr, and the theta relation near a_cr. Throws
// ASSERTION_FAILED on the first violation when strict.
SignRegionReport sign_region_check(const Real& t, const SignGridSpec& grid, Bits prec, bool strict = true);

}  // namespace pertlag
