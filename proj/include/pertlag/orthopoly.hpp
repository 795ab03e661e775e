#pragma once

#include <vector>

#include "pertlag/numkernel/lu.hpp"
#include "pertlag/weight_contour.hpp"

namespace pertlag {

// log det(mu_{i+j}), i, j < k. certified_digits is -1 unless the value came
// from the precision-doubling path.
struct HankelData {
  int k = 0;
  Complex log_det;
  int certified_digits = -1;
  Bits prec = 0;
};

// Reduce the imaginary part to (-pi, pi].
Complex principal_log_branch(const Complex& log_value);

// Shift log_value by a multiple of 2 pi i to land closest to reference.
Complex nearest_branch(const Complex& log_value, const Complex& reference);

// Needs moments up to 2k - 2. Throws SINGULAR when a pivot is lost in the
// rounding noise of its row.
HankelData hankel_logdet(int k, const MomentTable& m);

// Same, recomputed at prec and 2 prec (doubling up to cap) until the two runs
// agree to `digits` digits.
HankelData hankel_logdet_certified(int k, const WeightParams& p, Bits prec, int digits, Bits cap);

// Monic orthogonal polynomial coefficients for degree k, lowest power first.
// Needs moments up to 2k - 1.
std::vector<Complex> monic_coefficients(int k, const MomentTable& m);

struct RecurrenceRow {
  int k = 0;
  Complex gamma2;  // D_k / D_{k+1}
  Complex p;       // coefficient of z^{k-1} in pi_k
  Complex alpha;   // p_k - p_{k+1}
  Complex beta;    // D_{k+1} D_{k-1} / D_k^2, zero for k = 0
  Complex a;       // alpha_k - (2k + 1 + n) / n
};

struct RecurrenceTable {
  WeightParams params;
  Bits prec = 0;
  std::vector<Complex> log_det;              // k = 0..K+1, log D_0 = 0
  std::vector<std::vector<Complex>> monic;   // k = 0..K+1
  std::vector<RecurrenceRow> rows;           // k = 0..K
  Real orthogonality_residual;               // max_k max_{j<k} |int pi_k z^j w| / |int pi_k z^k w|
  Real recurrence_residual;                  // max_k of the three-term coefficient mismatch, relative

  int K() const { return static_cast<int>(rows.size()) - 1; }
};

// Highest moment index recurrence_table(K, .) reads.
inline int moments_needed(int K) { return 2 * K + 1; }

RecurrenceTable recurrence_table(int K, const MomentTable& m);

// Boundary data of the 2x2 orthogonal-polynomial RH solution of size k at the
// origin and its 1/z coefficient at infinity.
struct YBoundaryData {
  int k = 0;
  Complex y11, y12, y21, y22;
  Complex ym1_12, ym1_21;
  Complex c, q;
  Complex det;  // y11 y22 - y12 y21, should be 1
};

// k >= 1 and k <= r.K(). Integrals against w/z use the inverse moment.
YBoundaryData y_boundary(int k, const RecurrenceTable& r, const MomentTable& m);

// int pi_k pi_{k-1} w / z dz, from moments.
Complex product_over_z(int k, const RecurrenceTable& r, const MomentTable& m);

// Hankel log-derivative data at t, by differences over fresh moment tables.
struct HankelDerivatives {
  Complex H;      // t d/dt log D_k
  Complex dH_dt;
  Real err_H, err_dH;
};

HankelDerivatives hankel_derivatives(int k, const WeightParams& p, Bits prec);

struct IdentityReport {
  int k = 0, n = 0;
  Real t;
  Bits prec = 0;
  HankelDerivatives fd;
  Complex a, beta;
  YBoundaryData y;
  Complex dH_analytic;  // -n^2 ... from the derivative of p_k under the integral
  Real res_a_y;         // a_k versus 2 pi i t gamma_k^2 Y11(0) Y12(0)
  Real res_dh_y;        // dH/dt versus -n^2 Y12(0) Y21(0)
  Real res_beta_h;      // n^2 beta_k - k(k+n) - t dH/dt + H
  Real res_h_sum;       // H + n sum_{j<k} a_j
  Real res_first_integral;  // n^2 beta - n^2 t c q + H - k(k+n), over 1 + |n^2 beta|
  Real res_analytic;    // difference-quotient dH/dt versus the analytic route
  Real max_residual() const;
};

IdentityReport identity_suite(int k, const WeightParams& p, Bits prec);

// D_n[w; t] / D_n[w; 0].
Complex mgf(const WeightParams& p, Bits prec);

// log D_k along a path of t values, continued from the first point without
// 2 pi jumps. The first point should be t > 0, where D_k > 0.
std::vector<Complex> logdet_along(int k, const WeightParams& p, const std::vector<Real>& ts, Bits prec);

}  // namespace pertlag
