#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pertlag/equilibrium.hpp"
#include "pertlag/numkernel/taylor_ode.hpp"
#include "pertlag/weight_contour.hpp"

namespace pertlag {

// y'' = 6 y^2 + s. Hamiltonian H = y'^2 / 2 - 2 y^3 - s y, with H' = -y.
Real p1_hamiltonian(const Real& s, const Real& y, const Real& dy);

// y0(z) ~ sqrt(-z/6) [1 + sum_{k>=1} a_k (-z)^{-5k/2}] for real z < 0.
struct TritronqueeSeries {
  std::vector<Real> a;  // a[0] = 1, ..., a[K + 1]; the last term only feeds tail()

  int K() const { return static_cast<int>(a.size()) - 2; }
  Real y(const Real& z) const;
  Real dy(const Real& z) const;
  Real ddy(const Real& z) const;
  // Size of the first omitted term.
  Real tail(const Real& z) const;
  // |y'' - 6 y^2 - z| / |z| of the truncated sum, exact derivatives.
  Real plug_back_residual(const Real& z) const;
  // y(z), or DOMAIN when tail(z) > tol.
  Real eval(const Real& z, const Real& tol) const;
  // Same coefficients cut at order k.
  TritronqueeSeries truncated(int k) const;
};

TritronqueeSeries tritronquee_series(int K, Bits prec);

// a_1 = -1 / (8 sqrt 6), from substituting sqrt(-z/6)(1 + a_1 u) directly.
Real tritronquee_a1(Bits prec);

// Order <= K_max that minimises the omitted term at z.
int optimal_order(const TritronqueeSeries& full, const Real& z);

struct P1Point {
  Real s, y, dy, H;
};

struct P1Solution {
  Real s_start, s_end;
  int K = 0;               // series order used at s_start
  Real launch_tail;        // tail estimate at s_start
  SolutionGrid<Real> grid; // components y, y'
  bool pole = false;       // integration halted before s_end
  Real pole_location;      // estimated, when pole
  Real s_reached;

  Real y(const Real& s) const;
  Real dy(const Real& s) const;
  Real hamiltonian(const Real& s) const;
  // count equally spaced samples over [s_start, s_reached].
  std::vector<P1Point> sample(int count) const;
  // max |dH/ds + y| over count samples, dH/ds by central differences of H.
  Real hamiltonian_residual(int count) const;
};

// Launches from the series at s_start (optimal order <= K_max) and integrates
// toward s_end. A pole ahead halts the integration and is recorded; with
// strict it raises POLE_ENCOUNTERED instead.
P1Solution p1_solve(const Real& s_start, const Real& s_end, int K_max, Bits prec, bool strict = false);

// Double-scaling variable and its inverse.
Real s_star_scale(const CriticalConstants& cc);  // (2a)^{-3/5} (ab)^{-1/2} (b-a)^{2/5}
Real s_star_of(int n, const Real& t, const CriticalConstants& cc);
Real t_of_s_star(int n, const Real& s_star, const CriticalConstants& cc);

// Finite-n data at k = n for the weight with parameters (n, t, alpha).
struct FiniteNInputs {
  int n = 0;
  Real t;
  Complex alpha;
  Complex beta, a_nn, gamma2;
  std::optional<Complex> dH_dt;  // -n^2 Y12(0) Y21(0)
  Bits prec = 0;
  int agreement_digits = 0;      // between prec and prec / 2
};

// Where moment tables come from; empty means moment_table directly.
using MomentSource = std::function<MomentTable(const WeightParams&, int jmax, Bits prec)>;

// Contour offset used for the finite-n data, half of a_cr rounded.
Real finite_n_delta(Bits prec);

// Computed at prec and again at prec / 2 to fill agreement_digits.
FiniteNInputs finite_n_inputs(int n, const Real& t, const Complex& alpha, Bits prec, bool with_dH = true,
                              const MomentSource& source = {});

// Leading term plus first correction, as functions of y (resp. H).
Complex beta_model(int n, const Complex& y, const CriticalConstants& cc);
Complex a_model(int n, const Real& t, const Complex& y, const CriticalConstants& cc);
Complex dH_model(int n, const Complex& y, const CriticalConstants& cc);
Complex gamma2_model(int n, const Real& l, const Complex& H, const CriticalConstants& cc);

struct ExtractionRecord {
  int n = 0;
  Real t, s_star, l;
  std::optional<Complex> y_beta, y_a, y_dH, H_gamma;
  FiniteNInputs inputs;
};

// Inverts each model for y (resp. H). Throws DOMAIN when neither beta nor
// a_nn is present.
ExtractionRecord extract_suite(const FiniteNInputs& in, const Real& l, Bits prec);

struct ConsistencyPoint {
  Real s_star;
  Complex y_beta, y_a, y_dH, H;
  bool pole_suspect = false;
  Real spread_a, spread_dH;                       // |y_beta - y_a|, |y_beta - y_dH|
  std::optional<Real> p1_residual;                // |y'' - 6 y^2 - s| from differences of y_beta
  std::optional<Real> hamiltonian_residual;       // |H' + y_beta| from differences of H
};

struct ConsistencyLevel {
  int n = 0;
  std::vector<ConsistencyPoint> points;
  Real max_spread, max_p1_residual, max_hamiltonian_residual;
  int flagged = 0;
};

struct ConsistencyReport {
  std::vector<ConsistencyLevel> levels;  // ascending n
  // Per grid point, whether the cross-source spread shrank from the
  // second-largest to the largest n.
  std::vector<bool> spread_improved;
  int improved_count = 0;
  bool residuals_shrink = false;  // every max residual decreases with n
};

// records[i] holds one n on a common uniform s*-grid (ascending s*). Points
// with |y_beta| above pole_cap are flagged and left out of the stencils.
ConsistencyReport pi_consistency_check(const std::vector<std::vector<ExtractionRecord>>& records, double pole_cap,
                                       Bits prec);

}  // namespace pertlag
