#include "pertlag/painleve3.hpp"

#include <map>

#include "pertlag/numkernel/error.hpp"

namespace pertlag {

namespace {

using Poly = std::vector<Complex>;  // coefficients in L, lowest first

Complex czero(Bits prec) { return Complex(Real(0L, prec), Real(0L, prec)); }

Poly poly_mul(const Poly& a, const Poly& b, Bits prec) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, czero(prec));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

void poly_add(Poly& acc, const Poly& b, const Complex& scale) {
  if (acc.size() < b.size()) acc.resize(b.size(), czero(scale.prec()));
  for (std::size_t i = 0; i < b.size(); ++i) acc[i] += scale * b[i];
}

Poly poly_deriv(const Poly& a, Bits prec) {
  if (a.size() <= 1) return {czero(prec)};
  Poly r(a.size() - 1, czero(prec));
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long>(i);
  return r;
}

// theta (t^m P) = t^m (m P + P')
Poly theta(const Poly& a, int m, Bits prec) {
  Poly r = poly_deriv(a, prec);
  r.resize(std::max(r.size(), a.size()), czero(prec));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i] * static_cast<long>(m);
  return r;
}

Complex poly_eval(const Poly& a, const Complex& x, Bits prec) {
  Complex acc = czero(prec);
  for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
  return acc;
}

// Convolution coefficient m of series whose coefficients are L-polynomials.
Poly series_coeff(const std::vector<Poly>& a, const std::vector<Poly>& b, int m, Bits prec) {
  Poly r{czero(prec)};
  for (int i = 0; i <= m; ++i) {
    if (i >= static_cast<int>(a.size()) || m - i >= static_cast<int>(b.size())) continue;
    poly_add(r, poly_mul(a[i], b[m - i], prec), Complex(Real(1L, prec)));
  }
  return r;
}

}  // namespace

void P3Params::validate() const {
  if (k < 0) throw NumericError(ErrorCode::Domain, "k must be non-negative");
  if (n < 1) throw NumericError(ErrorCode::Domain, "n must be at least 1");
}

Complex P3Params::s_of(const Real& t) const {
  const Bits prec = t.prec();
  Complex root = sqrt(Complex(-t, Real(0L, prec)));
  return Complex(Real(0L, prec), Real(static_cast<long>(n), prec)) * root;
}

Complex p3_rhs(const P3Params& par, const Real& t, const Complex& a, const Complex& da) {
  const long n = par.n;
  const long N1 = n * (2L * par.k + 1 + n);
  const Real t2 = t * t;
  return da * da / a - da / t + a * a * N1 / t2 + a * a * a * (n * n) / t2 + Complex(Real(n * n, t.prec()) / t) -
         Complex(Real(n * n, t.prec())) / a;
}

Real p3_residual(const P3Params& par, const Real& t, const Complex& a, const Complex& da, const Complex& dda) {
  const long n = par.n;
  const long N1 = n * (2L * par.k + 1 + n);
  const Real t2 = t * t;
  Complex terms[] = {da * da / a, da / t, a * a * N1 / t2, a * a * a * (n * n) / t2,
                     Complex(Real(n * n, t.prec()) / t), Complex(Real(n * n, t.prec())) / a};
  Complex rhs = terms[0] - terms[1] + terms[2] + terms[3] + terms[4] - terms[5];
  Real scale = abs(dda);
  for (const auto& x : terms) scale = max(scale, abs(x));
  return abs(dda - rhs) / scale;
}

P3Series p3_series(const P3Params& par, const Complex& resonant, int order, Bits prec) {
  par.validate();
  if (order < par.n + 1) throw NumericError(ErrorCode::Domain, "series order must exceed n");
  // b = a/t - 1 satisfies (theta^2 - n^2) b = N1 t (1+b)^3 + n^2 t^2 (1+b)^4 - b theta^2 b + (theta b)^2.
  const long n = par.n;
  const long N1 = n * (2L * par.k + 1 + n);
  const Complex one(Real(1L, prec));
  P3Series s;
  s.par = par;
  s.resonant = resonant;
  s.e.assign(order + 1, Poly{czero(prec)});
  std::vector<Poly> B{Poly{one}}, B2{Poly{one}}, B3{Poly{one}}, B4{Poly{one}};
  std::vector<Poly> T1{Poly{czero(prec)}}, T2{Poly{czero(prec)}};
  for (int m = 1; m <= order; ++m) {
    Poly r{czero(prec)};
    poly_add(r, B3[m - 1], Complex(Real(N1, prec)));
    if (m >= 2) poly_add(r, B4[m - 2], Complex(Real(n * n, prec)));
    for (int i = 1; i < m; ++i) {
      poly_add(r, poly_mul(s.e[i], T2[m - i], prec), -one);
      poly_add(r, poly_mul(T1[i], T1[m - i], prec), one);
    }
    // Solve (m^2 - n^2) P + 2 m P' + P'' = r from the top power down.
    const long lin = static_cast<long>(m) * m - n * n;
    const int d = static_cast<int>(r.size()) - 1;
    Poly P;
    if (lin != 0) {
      P.assign(d + 1, czero(prec));
      for (int l = d; l >= 0; --l) {
        Complex v = r[l];
        if (l + 1 <= d) v -= P[l + 1] * (2L * m * (l + 1));
        if (l + 2 <= d) v -= P[l + 2] * (static_cast<long>(l + 2) * (l + 1));
        P[l] = v / lin;
      }
    } else {
      // Resonance: the equation fixes P[1..d+1]; P[0] is the free coefficient.
      P.assign(d + 2, czero(prec));
      for (int l = d; l >= 0; --l) {
        Complex v = r[l];
        if (l + 2 <= d + 1) v -= P[l + 2] * (static_cast<long>(l + 2) * (l + 1));
        P[l + 1] = v / (2L * m * (l + 1));
      }
      P[0] = resonant;
    }
    while (P.size() > 1 && P.back().real().is_zero() && P.back().imag().is_zero()) P.pop_back();
    for (const auto& c : P)
      if (!c.real().is_finite() || !c.imag().is_finite())
        throw NumericError(ErrorCode::SeriesLaunchFailed, "series coefficient " + std::to_string(m) + " is not finite");
    s.e[m] = P;
    B.push_back(P);
    T1.push_back(theta(P, m, prec));
    T2.push_back(theta(T1.back(), m, prec));
    B2.push_back(series_coeff(B, B, m, prec));
    B3.push_back(series_coeff(B2, B, m, prec));
    B4.push_back(series_coeff(B3, B, m, prec));
  }
  return s;
}

Complex P3Series::a(const Real& t) const {
  const Bits prec = t.prec();
  const Complex L(log(abs(t)));
  Complex acc(Real(1L, prec));
  Real tm(1L, prec);
  for (int m = 1; m <= order(); ++m) {
    tm *= t;
    acc += poly_eval(e[m], L, prec) * tm;
  }
  return acc * t;
}

Complex P3Series::da(const Real& t) const {
  // a' = 1 + sum t^m ((m+1) E_m + E_m')
  const Bits prec = t.prec();
  const Complex L(log(abs(t)));
  Complex acc(Real(1L, prec));
  Real tm(1L, prec);
  for (int m = 1; m <= order(); ++m) {
    tm *= t;
    Poly q = poly_deriv(e[m], prec);
    poly_add(q, e[m], Complex(Real(static_cast<long>(m + 1), prec)));
    acc += poly_eval(q, L, prec) * tm;
  }
  return acc;
}

Real P3Series::tail(const Real& t) const {
  const Bits prec = t.prec();
  const Complex L(log(abs(t)));
  const int M = order();
  Real last = abs(poly_eval(e[M], L, prec)) * pow(abs(t), static_cast<long>(M + 1));
  Real prev = abs(poly_eval(e[M - 1], L, prec)) * pow(abs(t), static_cast<long>(M));
  return max(last, prev);
}

namespace {

// Taylor recurrence of a t^2 a'' = t^2 a'^2 - t a a' + N1 a^3 + n^2 a^4 + n^2 t a - n^2 t^2
// in the components (Re a, Im a, Re a', Im a').
TaylorSystem<Real> p3_system(const P3Params& par, Bits prec) {
  struct State {
    std::vector<Complex> a, d, a2, a3, a4, dd;
  };
  auto st = std::make_shared<State>();
  const long n = par.n;
  const long N1 = n * (2L * par.k + 1 + n);
  TaylorSystem<Real> sys;
  sys.dim = 4;
  sys.next = [st, n, N1, prec](const Real& s0, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& out) {
    if (k == 0) *st = State{};
    State& S = *st;
    S.a.push_back(Complex(c[0][k], c[1][k]));
    S.d.push_back(Complex(c[2][k], c[3][k]));
    auto conv = [&](const std::vector<Complex>& x, const std::vector<Complex>& y, int m) {
      Complex acc = czero(prec);
      for (int i = 0; i <= m; ++i) acc += x[i] * y[m - i];
      return acc;
    };
    S.a2.push_back(conv(S.a, S.a, k));
    S.a3.push_back(conv(S.a2, S.a, k));
    S.a4.push_back(conv(S.a3, S.a, k));
    // t = s0 + x: coefficient m of t^2 f and t f from those of f.
    const Real t0 = s0, t0sq = s0 * s0, two_t0 = s0 * 2;
    auto t2_times = [&](const std::vector<Complex>& f, int m) {
      Complex r = f[m] * t0sq;
      if (m >= 1) r += f[m - 1] * two_t0;
      if (m >= 2) r += f[m - 2];
      return r;
    };
    auto t_times = [&](const std::vector<Complex>& f, int m) {
      Complex r = f[m] * t0;
      if (m >= 1) r += f[m - 1];
      return r;
    };
    std::vector<Complex> dsq(k + 1), ad(k + 1), P(k + 1);
    for (int m = 0; m <= k; ++m) {
      dsq[m] = conv(S.d, S.d, m);
      ad[m] = conv(S.a, S.d, m);
      P[m] = t2_times(S.a, m);
    }
    Complex rhs = t2_times(dsq, k) - t_times(ad, k) + S.a3[k] * N1 + S.a4[k] * (n * n) + t_times(S.a, k) * (n * n);
    // -n^2 t^2 contributes only to orders 0..2
    Complex t2k = k == 0 ? Complex(t0sq) : k == 1 ? Complex(two_t0) : k == 2 ? Complex(Real(1L, prec)) : czero(prec);
    rhs -= t2k * (n * n);
    // [P a'']_k = rhs with a''_j = (j+1) d_{j+1} known for j < k.
    for (int i = 1; i <= k; ++i) rhs -= P[i] * S.dd[k - i];
    Complex ddk = rhs / P[0];
    S.dd.push_back(ddk);
    Complex a_next = S.d[k] / static_cast<long>(k + 1);
    Complex d_next = ddk / static_cast<long>(k + 1);
    out[0] = a_next.real();
    out[1] = a_next.imag();
    out[2] = d_next.real();
    out[3] = d_next.imag();
  };
  return sys;
}

}  // namespace

Complex P3Trajectory::a(const Real& t) const {
  if (abs(t) <= abs(t_launch)) return series.a(t);
  auto y = grid.eval(t, 0);
  return Complex(y[0], y[1]);
}

Complex P3Trajectory::da(const Real& t) const {
  if (abs(t) <= abs(t_launch)) return series.da(t);
  auto y = grid.eval(t, 0);
  return Complex(y[2], y[3]);
}

P3Trajectory p3_solve(const P3Params& par, const Complex& resonant, const Real& t_end, Bits prec) {
  par.validate();
  if (t_end.is_zero()) throw NumericError(ErrorCode::Domain, "t_end must be non-zero");
  const Real te(t_end, prec);
  const int order = std::max(40, par.n + 24);
  P3Trajectory tr;
  tr.series = p3_series(par, resonant, order, prec);
  // Launch where the last retained terms are below the squared ODE tolerance.
  const Real target = ldexp(Real(1L, prec), -static_cast<long>(prec) + 16);
  Real t0 = te;
  int halvings = 0;
  while (!(tr.series.tail(t0) < target * abs(t0))) {
    t0 /= 2;
    if (++halvings > 4 * static_cast<int>(prec))
      throw NumericError(ErrorCode::SeriesLaunchFailed, "series tail never falls below tolerance");
  }
  tr.t_launch = t0;
  tr.max_step_residual = Real(0L, prec);
  if (abs(t0) >= abs(te)) return tr;

  const Complex a0 = tr.series.a(t0), d0 = tr.series.da(t0);
  OdeSpec<Real> spec;
  spec.tol = ldexp(Real(1L, prec), -static_cast<long>(prec) + 24);
  spec.order = std::clamp(static_cast<int>(prec / 8), 30, 120);
  spec.h_min = ldexp(abs(t0), -60);
  spec.h_max = Real(0L, prec);
  spec.pole_halt_distance = abs(te - t0);
  tr.grid = ode_solve(p3_system(par, prec), {a0.real(), a0.imag(), d0.real(), d0.imag()}, t0, te, spec);
  if (tr.grid.status == OdeStatus::PoleEncountered)
    throw NumericError(ErrorCode::PoleEncountered, "PIII trajectory meets a pole near t = " + tr.grid.pole_estimate.str(12));
  if (tr.grid.status == OdeStatus::StepUnderflow)
    throw NumericError(ErrorCode::StepUnderflow, "PIII step underflow at t = " + tr.grid.s_reached.str(12));
  for (const auto& step : tr.grid.steps) {
    if (step.h == 0) continue;
    Real tm = step.s0 + step.h / 2;
    auto y = tr.grid.eval(tm, 0);
    auto y1 = tr.grid.eval(tm, 1);
    Real r = p3_residual(par, tm, Complex(y[0], y[1]), Complex(y[2], y[3]), Complex(y1[2], y1[3]));
    tr.max_step_residual = max(tr.max_step_residual, r);
  }
  return tr;
}

Complex fit_resonant(const P3Params& par, const Real& t_anchor, const Complex& a_target, Bits prec) {
  auto miss = [&](const Complex& rho) { return p3_solve(par, rho, t_anchor, prec).a(Real(t_anchor, prec)) - a_target; };
  Complex r0 = czero(prec);
  Complex f0 = miss(r0);
  // a changes by about rho t^{n+1} for small t.
  Complex r1 = r0 - f0 / pow(Real(t_anchor, prec), static_cast<long>(par.n + 1));
  Complex f1 = miss(r1);
  const Real tol = ldexp(Real(1L, prec), -static_cast<long>(prec * 0.85)) * max(Real(1L, prec), abs(a_target));
  for (int it = 0; it < 60; ++it) {
    if (abs(f1) <= tol) return r1;
    Complex slope = (f1 - f0) / (r1 - r0);
    if (abs(slope).is_zero()) break;
    Complex step = f1 / slope;
    Complex r2, f2;
    // A step onto a solution with a pole before the anchor is halved.
    for (int tries = 0;; ++tries) {
      r2 = r1 - step;
      try {
        f2 = miss(r2);
        break;
      } catch (const NumericError& e) {
        if (tries >= 20 || (e.code() != ErrorCode::PoleEncountered && e.code() != ErrorCode::StepUnderflow)) throw;
        step = step / Real(2L, prec);
      }
    }
    r0 = r1;
    f0 = f1;
    r1 = r2;
    f1 = f2;
  }
  if (abs(f1) <= tol * 1024L) return r1;
  throw NumericError(ErrorCode::Nonconvergence, "resonant coefficient fit did not converge");
}

Complex hankel_a_value(int k, const WeightParams& p, Bits prec) {
  auto m = moment_table(p, moments_needed(k), prec);
  return recurrence_table(k, m).rows[k].a;
}

HankelA hankel_a(int k, const WeightParams& p, Bits prec, const Real& h, Stencil st, int levels) {
  const Real t(p.t, prec);
  std::map<std::string, Complex> cache;
  std::function<Complex(const Real&)> g = [&](const Real& tau) {
    std::string key = tau.str(0);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    WeightParams q = p;
    q.t = tau;
    Complex v = hankel_a_value(k, q, prec);
    cache.emplace(key, v);
    return v;
  };
  HankelA out;
  out.a = g(t);
  out.da = finite_diff<Complex, Real>(g, t, 1, h, st, levels).value;
  out.dda = finite_diff<Complex, Real>(g, t, 2, h, st, levels).value;
  return out;
}

HankelA hankel_a(int k, const WeightParams& p, Bits prec) {
  const Real h = default_fd_step<Real>(prec) * max(Real(1L, prec), abs(p.t)) * 64L;
  return hankel_a(k, p, prec, h, Stencil::FivePoint, 2);
}

P3VerifyReport p3_verify(int k, const WeightParams& base, const std::vector<Real>& grid, const Real& anchor,
                         Bits prec) {
  P3Params par{k, base.n};
  P3VerifyReport rep;
  rep.k = k;
  rep.n = base.n;
  rep.anchor = Real(anchor, prec);
  WeightParams q = base;
  q.t = rep.anchor;
  rep.resonant = fit_resonant(par, rep.anchor, hankel_a_value(k, q, prec), prec);
  rep.max_deviation = Real(0L, prec);
  rep.max_hankel_residual = Real(0L, prec);
  rep.max_step_residual = Real(0L, prec);
  // One trajectory to the far end of the grid covers every point on that side.
  Real far_pos(0L, prec), far_neg(0L, prec);
  for (const auto& t : grid) {
    if (t > far_pos) far_pos = Real(t, prec);
    if (t < far_neg) far_neg = Real(t, prec);
  }
  std::optional<P3Trajectory> pos, neg;
  if (far_pos > 0) pos = p3_solve(par, rep.resonant, far_pos, prec);
  if (far_neg < 0) neg = p3_solve(par, rep.resonant, far_neg, prec);
  for (const auto* tr : {pos ? &*pos : nullptr, neg ? &*neg : nullptr})
    if (tr) rep.max_step_residual = max(rep.max_step_residual, tr->max_step_residual);
  for (const auto& t : grid) {
    P3VerifyPoint pt;
    pt.t = Real(t, prec);
    q.t = pt.t;
    HankelA h = hankel_a(k, q, prec);
    pt.a_hankel = h.a;
    pt.a_ode = (t > 0 ? *pos : *neg).a(pt.t);
    pt.deviation = abs(pt.a_hankel - pt.a_ode);
    pt.hankel_residual = p3_residual(par, pt.t, h.a, h.da, h.dda);
    pt.a_over_t = h.a / pt.t;
    rep.max_deviation = max(rep.max_deviation, pt.deviation);
    rep.max_hankel_residual = max(rep.max_hankel_residual, pt.hankel_residual);
    rep.points.push_back(pt);
  }
  return rep;
}

UTransformPoint u_transform_check(int k, const WeightParams& p, Bits prec, const Real& h, Stencil st, int levels) {
  P3Params par{k, p.n};
  const long n = p.n;
  UTransformPoint out;
  out.t = Real(p.t, prec);
  const Real& t = out.t;
  HankelA ha = hankel_a(k, p, prec, h, st, levels);
  if (abs(ha.a) < ldexp(Real(1L, prec), -static_cast<long>(prec / 2)))
    throw NumericError(ErrorCode::DivisionNearZero, "a_{k,n} is too close to zero for the u-transform");
  out.s = par.s_of(t);
  const Complex& s = out.s;
  // u as a function of t: u = -n t / (s(t) a(t)); with s^2 = n^2 t, s(t)/t = n^2 / s,
  // so u = -s / (n a). Then du/ds = (du/dt) dt/ds with dt/ds = 2 s / n^2.
  const Complex ds_dt = Complex(Real(n * n, prec)) / (s * 2L);          // ds/dt
  const Complex dds_dt = -ds_dt * ds_dt / s;                              // d2s/dt2
  const Complex a = ha.a, da = ha.da, dda = ha.dda;
  const Complex u = -s / (a * n);
  const Complex u_t = -(ds_dt * a - s * da) / (a * a * n);
  // second t-derivative of -s/(n a)
  const Complex num = ds_dt * a - s * da;
  const Complex num_t = dds_dt * a - s * dda;
  const Complex u_tt = -(num_t * a * a - num * a * da * 2L) / (a * a * a * a * n);
  const Complex dt_ds = s * 2L / (n * n);
  const Complex ddt_ds = Complex(Real(2L, prec) / (n * n));
  out.u = u;
  out.du = u_t * dt_ds;
  out.ddu = u_tt * dt_ds * dt_ds + u_t * ddt_ds;
  const Complex one(Real(1L, prec));
  Complex terms[] = {out.du * out.du / u, out.du / s, (u * u * par.theta0() + one - Complex(Real(par.theta_inf(), prec))) * 4L / s,
                     u * u * u * 4L, one * 4L / u};
  Complex rhs = terms[0] - terms[1] + terms[2] + terms[3] - terms[4];
  Real scale = abs(out.ddu);
  for (const auto& x : terms) scale = max(scale, abs(x));
  out.residual = abs(out.ddu - rhs) / scale;
  Complex a_back = -(t * n) / (s * u);
  out.roundtrip = abs(a_back - a) / abs(a);
  return out;
}

UTransformPoint u_transform_check(int k, const WeightParams& p, Bits prec) {
  const Real h = default_fd_step<Real>(prec) * max(Real(1L, prec), abs(p.t)) * 64L;
  return u_transform_check(k, p, prec, h, Stencil::FivePoint, 2);
}

Real first_integral_check(int k, const WeightParams& p, Bits prec) {
  if (k < 1) throw NumericError(ErrorCode::Domain, "first integral needs k >= 1 (beta_0 is not defined)");
  return identity_suite(k, p, prec).res_first_integral;
}

namespace {

Mat2 diag_power(const Complex& base, const Complex& exponent) {
  const Bits prec = base.prec();
  Complex v = exp(exponent * log(base));
  Mat2 m;
  m << v, czero(prec), czero(prec), Complex(Real(1L, prec)) / v;
  return m;
}

Mat2 inverse2(const Mat2& m) {
  Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Mat2 r;
  r << m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det;
  return r;
}

Real max_abs(const Mat2& m) {
  Real r = abs(m(0, 0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r = max(r, abs(m(i, j)));
  return r;
}

}  // namespace

LaxReport lax_check(int k, const WeightParams& p, const std::vector<Complex>& lambdas, Bits prec) {
  if (p.t.is_zero()) throw NumericError(ErrorCode::Domain, "lax_check needs t != 0");
  if (k < 1) throw NumericError(ErrorCode::Domain, "lax_check needs k >= 1");
  const long n = p.n;
  const Real t(p.t, prec);
  P3Params par{k, p.n};
  auto m = moment_table(p, moments_needed(k), prec);
  auto r = recurrence_table(k, m);
  auto y = y_boundary(k, r, m);
  const Complex tpi(Real(0L, prec), 2 * pi(prec));
  const Complex I(Real(0L, prec), Real(1L, prec));
  const Complex one(Real(1L, prec));
  LaxReport rep;
  rep.s = par.s_of(t);
  const Complex& s = rep.s;
  const Complex ni = I * n;
  const Complex scale_up = exp(log(ni / s) * static_cast<long>(n + 2 * k));  // (n i / s)^{n+2k}
  const Complex& g2 = r.rows[k].gamma2;
  const Complex& g2m = r.rows[k - 1].gamma2;
  const Complex half_nk(Real(static_cast<long>(n + 2 * k), prec) / 2);
  rep.a_m1 << half_nk, -(one * n) / (tpi * g2) * scale_up, tpi * g2m * n / scale_up, -half_nk;
  const Complex cq = y.c * y.q;
  const Complex is2 = I * s / 2L;
  rep.a_m2 << is2 * (one - cq * 2L), is2 * (-y.c * 2L) * scale_up, is2 * (-y.q * 2L) * (one - cq) / scale_up,
      is2 * (cq * 2L - one);
  rep.trace_a_m1 = abs(rep.a_m1(0, 0) + rep.a_m1(1, 1));
  Complex det2 = rep.a_m2(0, 0) * rep.a_m2(1, 1) - rep.a_m2(0, 1) * rep.a_m2(1, 0);
  Complex quarter_s2 = s * s / 4L;
  rep.det_residual = abs(det2 - quarter_s2) / abs(quarter_s2);

  // Phi(lambda) = (ni/s)^{(n/2+k) sigma3} Y(z) e^{(i/2)(s lambda - s/lambda) sigma3} z^{(n/2) sigma3}, z = s lambda / (n i)
  const Complex pexp = half_nk;
  const Complex nhalf(Real(n, prec) / 2);
  const Mat2 left = diag_power(ni / s, pexp);
  auto phi = [&](const Complex& lam) {
    Complex z = s * lam / ni;
    Mat2 Y;
    auto pk = [&](const Complex& x) {
      Complex acc = czero(prec);
      for (std::size_t i = r.monic[k].size(); i-- > 0;) acc = acc * x + r.monic[k][i];
      return acc;
    };
    auto pkm = [&](const Complex& x) {
      Complex acc = czero(prec);
      for (std::size_t i = r.monic[k - 1].size(); i-- > 0;) acc = acc * x + r.monic[k - 1][i];
      return acc;
    };
    Complex c12 = weighted_integral(p, k, prec, [&](const Complex& x) { return pk(x) / (x - z); }) / tpi;
    Complex c22 = -g2m * weighted_integral(p, k, prec, [&](const Complex& x) { return pkm(x) / (x - z); });
    Y << pk(z), c12, -tpi * g2m * pkm(z), c22;
    Complex ph = I * (s * lam - s / lam) / 2L;
    Mat2 E;
    E << exp(ph), czero(prec), czero(prec), exp(-ph);
    return Mat2(left * Y * E * diag_power(z, nhalf));
  };
  for (const auto& lam : lambdas) {
    const Real h = ldexp(Real(1L, prec), -24);
    Mat2 fp = phi(lam + Complex(h)), fm = phi(lam - Complex(h));
    Mat2 fp2 = phi(lam + Complex(h * 2)), fm2 = phi(lam - Complex(h * 2));
    Mat2 d = (fm2 - fm * 8L + fp * 8L - fp2) / Complex(h * 12);
    Mat2 lhs = d * inverse2(phi(lam));
    Mat2 sig;
    sig << one, czero(prec), czero(prec), -one;
    Mat2 A = sig * (I * s / 2L) + rep.a_m1 / lam + rep.a_m2 / (lam * lam);
    rep.lax_residual.push_back(max_abs(Mat2(lhs - A)) / max(Real(1L, prec), max_abs(A)));
  }
  return rep;
}

}  // namespace pertlag
