#include "pertlag/orthopoly.hpp"

#include <map>

#include "pertlag/numkernel/certify.hpp"
#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/finite_diff.hpp"

namespace pertlag {

namespace {

Complex two_pi_i(Bits prec) { return Complex(Real(0L, prec), 2 * pi(prec)); }

Complex zero_c(Bits prec) { return Complex(Real(0L, prec), Real(0L, prec)); }

// Relative mismatch of a sum that should vanish, against its largest term.
Real relative(const Complex& sum, std::initializer_list<Complex> terms) {
  Real scale(0L, sum.prec());
  for (const auto& t : terms) scale = max(scale, abs(t));
  if (scale.is_zero()) return abs(sum);
  return abs(sum) / scale;
}

Mat<Complex> hankel_matrix(int k, const MomentTable& m, int shift = 0) {
  Mat<Complex> h(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) h(i, j) = m.mu(i + j + shift);
  return h;
}

void require_moments(int top, const MomentTable& m) {
  if (m.jmax() < top)
    throw NumericError(ErrorCode::Domain,
                       "moment table stops at j = " + std::to_string(m.jmax()) + ", need " + std::to_string(top));
}

// Factor and check every pivot against the rounding noise of its row.
LuFactor<Complex> checked_factor(const Mat<Complex>& h, Bits prec) {
  auto f = lu_factor<Complex>(h, Real(0L, prec));
  const Real noise = ldexp(Real(1L, prec), -static_cast<long>(prec) + 32);
  for (int i = 0; i < h.rows(); ++i) {
    Real row(0L, prec);
    for (int j = 0; j < h.cols(); ++j) row = max(row, abs(h(f.perm[i], j)));
    if (!(abs(f.lu(i, i)) > noise * row))
      throw NumericError(ErrorCode::Singular, "Hankel pivot " + std::to_string(i) + " of " +
                                                  std::to_string(h.rows()) + " is below working precision");
  }
  return f;
}

Complex poly_at_zero(const std::vector<Complex>& c) { return c.front(); }

// sum_i c_i mu_{i + shift}
Complex pair_with_moments(const std::vector<Complex>& c, const MomentTable& m, int shift) {
  Complex s = zero_c(m.prec);
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * m.mu(static_cast<int>(i) + shift);
  return s;
}

}  // namespace

Complex principal_log_branch(const Complex& v) {
  const Bits prec = v.prec();
  const Real tp = 2 * pi(prec);
  Real turns = round(v.imag() / tp);
  Real im = v.imag() - turns * tp;
  if (im <= -pi(prec)) im += tp;
  return Complex(v.real(), im);
}

Complex nearest_branch(const Complex& v, const Complex& ref) {
  const Real tp = 2 * pi(v.prec());
  Real turns = round((v.imag() - ref.imag()) / tp);
  return Complex(v.real(), v.imag() - turns * tp);
}

HankelData hankel_logdet(int k, const MomentTable& m) {
  if (k < 0) throw NumericError(ErrorCode::Domain, "Hankel size must be non-negative");
  HankelData d;
  d.k = k;
  d.prec = m.prec;
  if (k == 0) {
    d.log_det = zero_c(m.prec);
    return d;
  }
  require_moments(2 * k - 2, m);
  auto f = checked_factor(hankel_matrix(k, m), m.prec);
  d.log_det = principal_log_branch(lu_log_det(f));
  return d;
}

HankelData hankel_logdet_certified(int k, const WeightParams& p, Bits prec, int digits, Bits cap) {
  auto run = [&](Bits b) { return hankel_logdet(k, moment_table(p, std::max(2 * k - 2, 0), b)).log_det; };
  auto c = certify(run, prec, digits, cap);
  return {k, c.value, c.digits, 2 * c.prec};
}

namespace {

std::vector<Complex> solve_monic(int k, const LuFactor<Complex>& f, const MomentTable& m) {
  std::vector<Complex> c(k + 1, zero_c(m.prec));
  c[k] = Complex(Real(1L, m.prec));
  Vec<Complex> rhs(k);
  for (int i = 0; i < k; ++i) rhs(i) = -m.mu(k + i);
  Vec<Complex> x = lu_solve(f, rhs);
  for (int i = 0; i < k; ++i) c[i] = x(i);
  return c;
}

}  // namespace

std::vector<Complex> monic_coefficients(int k, const MomentTable& m) {
  if (k == 0) return {Complex(Real(1L, m.prec))};
  require_moments(2 * k - 1, m);
  return solve_monic(k, checked_factor(hankel_matrix(k, m), m.prec), m);
}

RecurrenceTable recurrence_table(int K, const MomentTable& m) {
  if (K < 0) throw NumericError(ErrorCode::Domain, "K must be non-negative");
  require_moments(moments_needed(K), m);
  const Bits prec = m.prec;
  const int n = m.params.n;
  RecurrenceTable r;
  r.params = m.params;
  r.prec = prec;
  r.log_det.push_back(zero_c(prec));
  r.monic.push_back({Complex(Real(1L, prec))});
  for (int k = 1; k <= K + 1; ++k) {
    auto f = checked_factor(hankel_matrix(k, m), prec);
    r.log_det.push_back(principal_log_branch(lu_log_det(f)));
    r.monic.push_back(solve_monic(k, f, m));
  }
  auto p_of = [&](int k) { return k == 0 ? zero_c(prec) : r.monic[k][k - 1]; };
  for (int k = 0; k <= K; ++k) {
    RecurrenceRow row;
    row.k = k;
    row.gamma2 = exp(r.log_det[k] - r.log_det[k + 1]);
    row.p = p_of(k);
    row.alpha = row.p - p_of(k + 1);
    row.beta = k == 0 ? zero_c(prec) : exp(r.log_det[k + 1] + r.log_det[k - 1] - r.log_det[k] * 2L);
    row.a = row.alpha - Complex(Real(static_cast<long>(2 * k + 1 + n), prec) / static_cast<long>(n));
    r.rows.push_back(row);
  }

  r.orthogonality_residual = Real(0L, prec);
  r.recurrence_residual = Real(0L, prec);
  for (int k = 1; k <= K; ++k) {
    const auto& c = r.monic[k];
    Real norm = abs(pair_with_moments(c, m, k));
    for (int j = 0; j < k; ++j)
      r.orthogonality_residual = max(r.orthogonality_residual, abs(pair_with_moments(c, m, j)) / norm);
  }
  // z pi_k - pi_{k+1} - alpha_k pi_k - beta_k pi_{k-1}, coefficient by coefficient.
  for (int k = 0; k <= K; ++k) {
    const auto& row = r.rows[k];
    std::vector<Complex> lhs(k + 2, zero_c(prec));
    Real scale(0L, prec);
    for (int i = 0; i <= k; ++i) lhs[i + 1] += r.monic[k][i];
    for (int i = 0; i <= k + 1; ++i) lhs[i] -= r.monic[k + 1][i];
    for (int i = 0; i <= k; ++i) lhs[i] -= row.alpha * r.monic[k][i];
    if (k > 0)
      for (int i = 0; i < k; ++i) lhs[i] -= row.beta * r.monic[k - 1][i];
    for (int i = 0; i <= k + 1; ++i) scale = max(scale, abs(r.monic[k + 1][i]));
    for (int i = 0; i <= k; ++i) scale = max(scale, abs(row.alpha * r.monic[k][i]));
    for (const auto& v : lhs) r.recurrence_residual = max(r.recurrence_residual, abs(v) / scale);
  }
  return r;
}

YBoundaryData y_boundary(int k, const RecurrenceTable& r, const MomentTable& m) {
  if (k < 1 || k > r.K()) throw NumericError(ErrorCode::Domain, "y_boundary needs 1 <= k <= K");
  const Bits prec = m.prec;
  const Complex tpi = two_pi_i(prec);
  const auto& pk = r.monic[k];
  const auto& pkm = r.monic[k - 1];
  const Complex& g2m = r.rows[k - 1].gamma2;
  YBoundaryData y;
  y.k = k;
  y.y11 = poly_at_zero(pk);
  y.y12 = pair_with_moments(pk, m, -1) / tpi;
  y.y21 = -tpi * g2m * poly_at_zero(pkm);
  y.y22 = -g2m * pair_with_moments(pkm, m, -1);
  // Y12(z) ~ -(1 / 2 pi i) z^{-k-1} int pi_k s^k w, Y21(z) ~ -2 pi i gamma_{k-1}^2 z^{k-1}.
  y.ym1_12 = -pair_with_moments(pk, m, k) / tpi;
  y.ym1_21 = -tpi * g2m;
  y.c = y.y11 * y.y12;
  y.q = tpi * g2m * poly_at_zero(pkm) / y.y11;
  y.det = y.y11 * y.y22 - y.y12 * y.y21;
  return y;
}

Complex product_over_z(int k, const RecurrenceTable& r, const MomentTable& m) {
  const auto& a = r.monic[k];
  const auto& b = r.monic[k - 1];
  std::vector<Complex> prod(a.size() + b.size() - 1, zero_c(m.prec));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
  return pair_with_moments(prod, m, -1);
}

HankelDerivatives hankel_derivatives(int k, const WeightParams& p, Bits prec) {
  if (k < 1) throw NumericError(ErrorCode::Domain, "hankel_derivatives needs k >= 1");
  const Real t(p.t, prec);
  const Complex center = hankel_logdet(k, moment_table(p, 2 * k - 2, prec)).log_det;
  // Stencil points repeat between the first and second derivative passes.
  std::map<std::string, Complex> cache;
  std::function<Complex(const Real&)> g = [&](const Real& tau) {
    std::string key = tau.str(0);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    WeightParams q = p;
    q.t = tau;
    Complex v = nearest_branch(hankel_logdet(k, moment_table(q, 2 * k - 2, prec)).log_det, center) - center;
    cache.emplace(key, v);
    return v;
  };
  const Real h = default_fd_step<Real>(prec) * max(Real(1L, prec), abs(t)) * 64L;
  auto d1 = finite_diff<Complex, Real>(g, t, 1, h, Stencil::FivePoint, 2);
  auto d2 = finite_diff<Complex, Real>(g, t, 2, h, Stencil::FivePoint, 2);
  HankelDerivatives out;
  out.H = d1.value * t;
  out.dH_dt = d1.value + d2.value * t;
  out.err_H = d1.err * abs(t);
  out.err_dH = d1.err + d2.err * abs(t);
  return out;
}

Real IdentityReport::max_residual() const {
  return max(max(max(res_a_y, res_dh_y), max(res_beta_h, res_h_sum)), max(res_first_integral, res_analytic));
}

IdentityReport identity_suite(int k, const WeightParams& p, Bits prec) {
  if (p.t.is_zero()) throw NumericError(ErrorCode::Domain, "identity suite needs t != 0");
  if (k < 1) throw NumericError(ErrorCode::Domain, "identity suite needs k >= 1");
  const int n = p.n;
  const long n2 = static_cast<long>(n) * n;
  const long kk = static_cast<long>(k) * (k + n);
  const Complex tpi = two_pi_i(prec);
  IdentityReport rep;
  rep.k = k;
  rep.n = n;
  rep.t = Real(p.t, prec);
  rep.prec = prec;
  const Real& t = rep.t;

  auto m = moment_table(p, moments_needed(k), prec);
  auto r = recurrence_table(k, m);
  rep.y = y_boundary(k, r, m);
  rep.a = r.rows[k].a;
  rep.beta = r.rows[k].beta;
  rep.fd = hankel_derivatives(k, p, prec);
  const Complex& H = rep.fd.H;
  const Complex& dH = rep.fd.dH_dt;

  Complex a_y = tpi * t * r.rows[k].gamma2 * rep.y.y11 * rep.y.y12;
  rep.res_a_y = relative(rep.a - a_y, {rep.a, a_y});

  Complex dh_y = -(rep.y.y12 * rep.y.y21) * n2;
  rep.res_dh_y = relative(dH - dh_y, {dH, dh_y});

  Complex nb = rep.beta * n2;
  Complex kkc(Real(kk, prec));
  rep.res_beta_h = relative(nb - kkc - dH * t + H, {nb, kkc, dH * t, H});

  Complex sum_a = zero_c(prec);
  for (int j = 0; j < k; ++j) sum_a += r.rows[j].a;
  rep.res_h_sum = relative(H + sum_a * static_cast<long>(n), {H, sum_a * static_cast<long>(n)});

  Complex ntcq = rep.y.c * rep.y.q * t * n2;
  rep.res_first_integral = abs(nb - ntcq + H - kkc) / (1 + abs(nb));

  rep.dH_analytic = r.rows[k - 1].gamma2 * product_over_z(k, r, m) * n2;
  rep.res_analytic = relative(dH - rep.dH_analytic, {dH, rep.dH_analytic});
  return rep;
}

Complex mgf(const WeightParams& p, Bits prec) {
  const int n = p.n;
  WeightParams q = p;
  q.t = Real(0L, prec);
  Complex lt = hankel_logdet(n, moment_table(p, 2 * n - 2, prec)).log_det;
  Complex l0 = hankel_logdet(n, moment_table(q, 2 * n - 2, prec)).log_det;
  return exp(lt - l0);
}

std::vector<Complex> logdet_along(int k, const WeightParams& p, const std::vector<Real>& ts, Bits prec) {
  std::vector<Complex> out;
  for (const auto& tau : ts) {
    WeightParams q = p;
    q.t = Real(tau, prec);
    Complex v = hankel_logdet(k, moment_table(q, std::max(2 * k - 2, 0), prec)).log_det;
    out.push_back(out.empty() ? v : nearest_branch(v, out.back()));
  }
  return out;
}

}  // namespace pertlag
