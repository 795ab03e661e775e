#include "pertlag/painleve1.hpp"

#include <algorithm>
#include <cmath>

#include "pertlag/numkernel/certify.hpp"
#include "pertlag/numkernel/error.hpp"
#include "pertlag/orthopoly.hpp"

namespace pertlag {

Real p1_hamiltonian(const Real& s, const Real& y, const Real& dy) { return dy * dy / 2L - 2 * y * y * y - s * y; }

namespace {

void require_negative(const Real& z) {
  if (!(z < 0)) throw NumericError(ErrorCode::Domain, "tritronquee series needs z < 0");
}

// sum_k a_k p_k(k) x^{e0 - 5k/2} over the retained orders, p_k a weight per order.
template <class F>
Real power_sum(const TritronqueeSeries& ts, const Real& x, double e0, F&& weight) {
  const Bits prec = x.prec();
  const Real u = pow(x, Real(-5L, prec) / 2L);
  Real acc(0L, prec);
  Real up(1L, prec);
  for (int k = 0; k <= ts.K(); ++k) {
    acc += ts.a[k] * weight(k) * up;
    up *= u;
  }
  return acc * pow(x, Real(e0, prec)) / sqrt(Real(6L, prec));
}

}  // namespace

TritronqueeSeries tritronquee_series(int K, Bits prec) {
  if (K < 1) throw NumericError(ErrorCode::Domain, "series order must be at least 1");
  TritronqueeSeries ts;
  const Real r6 = sqrt(Real(6L, prec));
  ts.a.push_back(Real(1L, prec));
  // Matching x^{1 - 5m/2} in y_xx = 6 y^2 - x with y = sum a_k x^{1/2 - 5k/2} / sqrt 6:
  // 2 a_m = a_{m-1} c_{m-1} / sqrt 6 - sum_{0<j<m} a_j a_{m-j}, c_k = (25 k^2 - 1) / 4.
  for (int m = 1; m <= K + 1; ++m) {
    const long k = m - 1;
    Real acc = ts.a[k] * Real(25L * k * k - 1, prec) / 4L / r6;
    for (int j = 1; j < m; ++j) acc -= ts.a[j] * ts.a[m - j];
    ts.a.push_back(acc / 2L);
  }
  return ts;
}

Real tritronquee_a1(Bits prec) { return -Real(1L, prec) / (8 * sqrt(Real(6L, prec))); }

TritronqueeSeries TritronqueeSeries::truncated(int k) const {
  if (k < 1 || k > K()) throw NumericError(ErrorCode::Domain, "truncation order out of range");
  TritronqueeSeries out;
  out.a.assign(a.begin(), a.begin() + k + 2);
  return out;
}

Real TritronqueeSeries::y(const Real& z) const {
  require_negative(z);
  return power_sum(*this, -z, 0.5, [&](int) { return Real(1L, z.prec()); });
}

Real TritronqueeSeries::dy(const Real& z) const {
  require_negative(z);
  // d/dz = -d/dx
  return -power_sum(*this, -z, -0.5, [&](int k) { return Real(1L - 5L * k, z.prec()) / 2L; });
}

Real TritronqueeSeries::ddy(const Real& z) const {
  require_negative(z);
  return power_sum(*this, -z, -1.5, [&](int k) {
    const long kk = k;
    return Real(25L * kk * kk - 1, z.prec()) / 4L;
  });
}

Real TritronqueeSeries::tail(const Real& z) const {
  require_negative(z);
  const Real x = -z;
  const Bits prec = z.prec();
  return abs(a.back()) * pow(x, Real(-5L * (K() + 1), prec) / 2L) * sqrt(x / 6L);
}

Real TritronqueeSeries::plug_back_residual(const Real& z) const {
  Real v = y(z);
  return abs(ddy(z) - 6 * v * v - z) / abs(z);
}

Real TritronqueeSeries::eval(const Real& z, const Real& tol) const {
  if (tail(z) > tol) throw NumericError(ErrorCode::Domain, "series tail above tolerance at z = " + z.str(8));
  return y(z);
}

int optimal_order(const TritronqueeSeries& full, const Real& z) {
  require_negative(z);
  const Real u = pow(-z, Real(-5L, z.prec()) / 2L);
  int best = 1;
  Real best_term = abs(full.a[1]) * u;
  Real up = u;
  for (int k = 2; k < static_cast<int>(full.a.size()); ++k) {
    up *= u;
    Real term = abs(full.a[k]) * up;
    if (term < best_term) {
      best_term = term;
      best = k;
    }
  }
  return std::max(1, best - 1);
}

Real P1Solution::y(const Real& s) const { return grid.eval(s, 0)[0]; }
Real P1Solution::dy(const Real& s) const { return grid.eval(s, 0)[1]; }
Real P1Solution::hamiltonian(const Real& s) const {
  auto v = grid.eval(s, 0);
  return p1_hamiltonian(s, v[0], v[1]);
}

std::vector<P1Point> P1Solution::sample(int count) const {
  std::vector<P1Point> out;
  for (int i = 0; i < count; ++i) {
    Real s = count == 1 ? Real(s_start) : Real(s_start + (s_reached - s_start) * static_cast<long>(i) / (count - 1L));
    auto v = grid.eval(s, 0);
    out.push_back({s, v[0], v[1], p1_hamiltonian(s, v[0], v[1])});
  }
  return out;
}

Real P1Solution::hamiltonian_residual(int count) const {
  const Bits prec = s_start.prec();
  const Real h = ldexp(Real(1L, prec), -static_cast<long>(prec) / 4);
  Real worst(0L, prec);
  for (int i = 1; i < count - 1; ++i) {
    Real s = s_start + (s_reached - s_start) * static_cast<long>(i) / (count - 1L);
    Real dH = (hamiltonian(s + h) - hamiltonian(s - h)) / (2 * h);
    worst = max(worst, abs(dH + y(s)));
  }
  return worst;
}

namespace {

TaylorSystem<Real> p1_system(Bits prec) {
  TaylorSystem<Real> sys;
  sys.dim = 2;
  sys.next = [prec](const Real& s0, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& out) {
    Real sq(0L, prec);
    for (int i = 0; i <= k; ++i) sq += c[0][i] * c[0][k - i];
    Real rhs = 6 * sq;
    if (k == 0) rhs += s0;
    if (k == 1) rhs += Real(1L, prec);
    out[0] = c[1][k] / static_cast<long>(k + 1);
    out[1] = rhs / static_cast<long>(k + 1);
  };
  return sys;
}

}  // namespace

P1Solution p1_solve(const Real& s_start_in, const Real& s_end_in, int K_max, Bits prec, bool strict) {
  const Real s0(s_start_in, prec), s1(s_end_in, prec);
  auto full = tritronquee_series(K_max, prec);
  P1Solution sol;
  sol.s_start = s0;
  sol.s_end = s1;
  sol.K = optimal_order(full, s0);
  auto ts = full.truncated(sol.K);
  sol.launch_tail = ts.tail(s0);
  OdeSpec<Real> spec;
  spec.tol = ldexp(Real(1L, prec), -static_cast<long>(prec) + 24);
  spec.order = std::clamp(static_cast<int>(prec / 8), 30, 120);
  spec.h_min = ldexp(Real(1L, prec), -60);
  spec.h_max = Real(0L, prec);
  spec.pole_halt_distance = Real("0.1", prec);
  sol.grid = ode_solve(p1_system(prec), {ts.y(s0), ts.dy(s0)}, s0, s1, spec);
  sol.s_reached = sol.grid.s_reached;
  sol.pole_location = Real(0L, prec);
  if (sol.grid.status != OdeStatus::Ok) {
    sol.pole = true;
    sol.pole_location = sol.grid.pole_estimate;
    if (strict)
      throw NumericError(ErrorCode::PoleEncountered, "Painleve I trajectory halted near s = " + sol.pole_location.str(12));
  }
  return sol;
}

Real s_star_scale(const CriticalConstants& cc) {
  const Bits prec = cc.a_cr.prec();
  const Real& a = cc.a_cr;
  const Real& b = cc.b_cr;
  return pow(2 * a, Real(-3L, prec) / 5L) / sqrt(a * b) * pow(b - a, Real(2L, prec) / 5L);
}

Real s_star_of(int n, const Real& t, const CriticalConstants& cc) {
  const Bits prec = cc.a_cr.prec();
  return pow(Real(static_cast<long>(n), prec), Real(4L, prec) / 5L) * (cc.t_cr - t) * s_star_scale(cc);
}

Real t_of_s_star(int n, const Real& s, const CriticalConstants& cc) {
  const Bits prec = cc.a_cr.prec();
  return cc.t_cr - s * pow(Real(static_cast<long>(n), prec), Real(-4L, prec) / 5L) / s_star_scale(cc);
}

namespace {

Real n_pow(int n, long num, long den, Bits prec) {
  return pow(Real(static_cast<long>(n), prec), Real(num, prec) / den);
}

struct ModelConstants {
  Real beta0, k_beta, k_a, dh0, k_dh, g0, k_g, sqrt_ab;
  explicit ModelConstants(const CriticalConstants& cc) {
    const Bits prec = cc.a_cr.prec();
    const Real& a = cc.a_cr;
    const Real& b = cc.b_cr;
    const Real fifth = Real(1L, prec) / 5L;
    sqrt_ab = sqrt(a * b);
    beta0 = (b - a) * (b - a) / 16L;
    k_beta = pow(2 * a * (b - a), 4 * fifth) / 4L;
    k_a = pow(Real(2L, prec), 4 * fifth) / (pow(a, fifth) * pow(b - a, fifth));
    dh0 = sqrt(a / b) + sqrt(b / a) - 2;
    k_dh = 2 * pow(b - a, 4 * fifth) / (pow(2 * a, fifth) * sqrt_ab);
    g0 = Real(2L, prec) / (pi(prec) * (b - a));
    k_g = 2 * pow(2 * a, 4 * fifth) / pow(b - a, fifth);
  }
};

}  // namespace

Complex beta_model(int n, const Complex& y, const CriticalConstants& cc) {
  ModelConstants m(cc);
  return m.beta0 - y * m.k_beta / n_pow(n, 2, 5, cc.a_cr.prec());
}

Complex a_model(int n, const Real& t, const Complex& y, const CriticalConstants& cc) {
  ModelConstants m(cc);
  return (Real(1L, cc.a_cr.prec()) - y * m.k_a / n_pow(n, 2, 5, cc.a_cr.prec())) * (t / m.sqrt_ab);
}

Complex dH_model(int n, const Complex& y, const CriticalConstants& cc) {
  ModelConstants m(cc);
  const Real nn(static_cast<long>(n), cc.a_cr.prec());
  return -(m.dh0 - y * m.k_dh / n_pow(n, 2, 5, cc.a_cr.prec())) * (nn * nn / 4L);
}

Complex gamma2_model(int n, const Real& l, const Complex& H, const CriticalConstants& cc) {
  ModelConstants m(cc);
  const Real e = exp(-l * static_cast<long>(n));
  return (Real(1L, cc.a_cr.prec()) + H * m.k_g / n_pow(n, 1, 5, cc.a_cr.prec())) * (m.g0 * e);
}

namespace {

struct RawInputs {
  Complex beta, a, gamma2;
  std::optional<Complex> dH;
};

RawInputs raw_inputs(int n, const Real& t, const Complex& alpha, Bits prec, bool with_dH, const MomentSource& source) {
  WeightParams wp{n, Real(t, prec), Complex(Real(alpha.real(), prec), Real(alpha.imag(), prec)), finite_n_delta(prec)};
  auto m = source ? source(wp, moments_needed(n), prec) : moment_table(wp, moments_needed(n), prec);
  auto r = recurrence_table(n, m);
  RawInputs out{r.rows[n].beta, r.rows[n].a, r.rows[n].gamma2, std::nullopt};
  if (with_dH) {
    auto y = y_boundary(n, r, m);
    const Real nn(static_cast<long>(n), prec);
    out.dH = -(nn * nn) * y.y12 * y.y21;
  }
  return out;
}

}  // namespace

Real finite_n_delta(Bits prec) { return Real("0.0381", prec); }

FiniteNInputs finite_n_inputs(int n, const Real& t, const Complex& alpha, Bits prec, bool with_dH,
                              const MomentSource& source) {
  auto hi = raw_inputs(n, t, alpha, prec, with_dH, source);
  auto lo = raw_inputs(n, t, alpha, prec / 2, with_dH, source);
  FiniteNInputs in;
  in.n = n;
  in.t = Real(t, prec);
  in.alpha = alpha;
  in.beta = hi.beta;
  in.a_nn = hi.a;
  in.gamma2 = hi.gamma2;
  in.dH_dt = hi.dH;
  in.prec = prec;
  int d = std::min({agreement_digits(hi.beta, lo.beta), agreement_digits(hi.a, lo.a), agreement_digits(hi.gamma2, lo.gamma2)});
  if (hi.dH && lo.dH) d = std::min(d, agreement_digits(*hi.dH, *lo.dH));
  in.agreement_digits = d;
  return in;
}

ExtractionRecord extract_suite(const FiniteNInputs& in, const Real& l_in, Bits prec) {
  if (in.n < 1) throw NumericError(ErrorCode::Domain, "extraction needs n >= 1");
  const auto cc = critical_constants(prec);
  ModelConstants m(cc);
  const int n = in.n;
  const Real t(in.t, prec);
  const Real l(l_in, prec);
  const Real n25 = n_pow(n, 2, 5, prec);
  ExtractionRecord rec;
  rec.n = n;
  rec.t = t;
  rec.l = l;
  rec.s_star = s_star_of(n, t, cc);
  rec.inputs = in;
  rec.y_beta = (m.beta0 - in.beta) * n25 / m.k_beta;
  if (t.is_zero()) throw NumericError(ErrorCode::Domain, "a_nn extraction needs t != 0");
  rec.y_a = (Real(1L, prec) - in.a_nn * m.sqrt_ab / t) * n25 / m.k_a;
  if (in.dH_dt) {
    const Real nn(static_cast<long>(n), prec);
    rec.y_dH = (m.dh0 + *in.dH_dt * 4L / (nn * nn)) * n25 / m.k_dh;
  }
  // gamma^2 e^{nl} via logs, both factors are far outside double range for large n
  Complex scaled = exp(log(in.gamma2) + l * static_cast<long>(n));
  rec.H_gamma = (scaled / m.g0 - Real(1L, prec)) * n_pow(n, 1, 5, prec) / m.k_g;
  return rec;
}

ConsistencyReport pi_consistency_check(const std::vector<std::vector<ExtractionRecord>>& records, double pole_cap,
                                       Bits prec) {
  ConsistencyReport rep;
  const Real cap(pole_cap, prec);
  for (const auto& level_in : records) {
    if (level_in.empty()) continue;
    auto level_recs = level_in;
    std::sort(level_recs.begin(), level_recs.end(),
              [](const ExtractionRecord& x, const ExtractionRecord& y) { return x.s_star < y.s_star; });
    ConsistencyLevel lv;
    lv.n = level_recs.front().n;
    lv.max_spread = lv.max_p1_residual = lv.max_hamiltonian_residual = Real(0L, prec);
    const Complex zero(Real(0L, prec));
    for (const auto& r : level_recs) {
      ConsistencyPoint p;
      p.s_star = Real(r.s_star, prec);
      p.y_beta = r.y_beta.value_or(zero);
      p.y_a = r.y_a.value_or(zero);
      p.y_dH = r.y_dH.value_or(zero);
      p.H = r.H_gamma.value_or(zero);
      p.pole_suspect = !r.y_beta || abs(p.y_beta) > cap;
      p.spread_a = r.y_a ? abs(p.y_beta - p.y_a) : Real(0L, prec);
      p.spread_dH = r.y_dH ? abs(p.y_beta - p.y_dH) : Real(0L, prec);
      if (p.pole_suspect) ++lv.flagged;
      else lv.max_spread = max(lv.max_spread, max(p.spread_a, p.spread_dH));
      lv.points.push_back(p);
    }
    const std::size_t N = lv.points.size();
    for (std::size_t i = 1; i + 1 < N; ++i) {
      auto& p = lv.points[i];
      const auto& lo = lv.points[i - 1];
      const auto& hi = lv.points[i + 1];
      if (p.pole_suspect || lo.pole_suspect || hi.pole_suspect) continue;
      Real h = (hi.s_star - lo.s_star) / 2L;
      Complex d2 = (hi.y_beta - 2 * p.y_beta + lo.y_beta) / (h * h);
      p.p1_residual = abs(d2 - 6 * p.y_beta * p.y_beta - p.s_star);
      lv.max_p1_residual = max(lv.max_p1_residual, *p.p1_residual);
      bool have_H = level_recs[i - 1].H_gamma && level_recs[i + 1].H_gamma;
      if (have_H) {
        Complex dH = (hi.H - lo.H) / (2 * h);
        p.hamiltonian_residual = abs(dH + p.y_beta);
        lv.max_hamiltonian_residual = max(lv.max_hamiltonian_residual, *p.hamiltonian_residual);
      }
    }
    rep.levels.push_back(std::move(lv));
  }
  std::sort(rep.levels.begin(), rep.levels.end(), [](const auto& x, const auto& y) { return x.n < y.n; });
  if (rep.levels.size() >= 2) {
    const auto& prev = rep.levels[rep.levels.size() - 2];
    const auto& last = rep.levels.back();
    const std::size_t N = std::min(prev.points.size(), last.points.size());
    for (std::size_t i = 0; i < N; ++i) {
      bool better = last.points[i].spread_a < prev.points[i].spread_a;
      rep.spread_improved.push_back(better);
      if (better) ++rep.improved_count;
    }
    rep.residuals_shrink = true;
    for (std::size_t j = 1; j < rep.levels.size(); ++j) {
      const auto& a = rep.levels[j - 1];
      const auto& b = rep.levels[j];
      if (!(b.max_spread < a.max_spread) || !(b.max_p1_residual < a.max_p1_residual) ||
          !(b.max_hamiltonian_residual < a.max_hamiltonian_residual))
        rep.residuals_shrink = false;
    }
  }
  return rep;
}

}  // namespace pertlag
