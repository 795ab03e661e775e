#include "pertlag/equilibrium.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/newton.hpp"
#include "pertlag/numkernel/quadrature.hpp"

namespace pertlag {

namespace {

Real quad_tol(Bits prec) { return ldexp(Real(1L, prec), -static_cast<long>(prec) + 16); }

Complex integrate(const std::function<Complex(const Real&)>& f, const Real& lo, const Real& hi, Bits prec,
                  EndpointHint hint = EndpointHint::None) {
  const Real tol = quad_tol(prec);
  QuadratureSpec<Real> spec{tol, tol, 20, hint, 0.0, {}};
  ScalarIntegrand<Real> g = [&](const Complex& z) { return f(z.real()); };
  auto r = quad_segment<Real>(g, PathSegment<Real>::line(Complex(lo), Complex(hi)), spec);
  if (!r.converged) throw NumericError(ErrorCode::Nonconvergence, "equilibrium quadrature did not converge");
  return r.value;
}

// Square root with the argument of w taken in (0, 2 pi); on the positive
// axis the side picks argument 0 (upper) or 2 pi (lower).
Complex sqrt02(const Complex& w, Side side) {
  const Bits prec = w.real().prec();
  if (w.imag().is_zero() && w.real().sign() > 0) {
    Real r = sqrt(w.real());
    return side == Side::Upper ? Complex(r, Real(0L, prec)) : Complex(-r, Real(0L, prec));
  }
  return imag_unit(prec) * sqrt(-w);
}

bool on_positive_axis_right_of(const Complex& z, const Real& x0) { return z.imag().is_zero() && z.real() > x0; }

}  // namespace

Real potential(const Real& x, const Real& t) { return x - log(x) + t / x; }

CriticalConstants critical_constants(Bits prec) {
  const Real c = cbrt(Real(2L, prec));
  const Real one(1L, prec);
  CriticalConstants cc;
  cc.t_cr = -Real(3L, prec) / 4L * (c - one) * (c - one);
  cc.a_cr = (Real(3L, prec) - c - c * c) / 2L;
  cc.b_cr = Real(3L, prec) / 2L * (one + c + c * c);
  return cc;
}

EquilibriumData solve_endpoints(const Real& t_in, Bits prec) {
  const Real t(t_in, prec);
  const Real one(1L, prec);
  const Real huge = ldexp(one, 100);
  Real t_cur(0L, prec);
  SystemFn<Real> F = [&](const std::vector<Real>& x) -> std::vector<Real> {
    const Real &a = x[0], &b = x[1];
    if (!(a > 0) || !(b > 0)) return {huge, huge};
    Real p = sqrt(a * b);
    return {one + t_cur * (a + b) / (2 * a * b) - p, (a + b) / 2L - t_cur / p - Real(3L, prec)};
  };
  JacobianFn<Real> J = [&](const std::vector<Real>& x) {
    const Real &a = x[0], &b = x[1];
    Real p = sqrt(a * b);
    Real p3 = p * p * p;
    Mat<Real> m(2, 2);
    m(0, 0) = -t_cur / (2 * a * a) - b / (2 * p);
    m(0, 1) = -t_cur / (2 * b * b) - a / (2 * p);
    m(1, 0) = one / 2L + t_cur * b / (2 * p3);
    m(1, 1) = one / 2L + t_cur * a / (2 * p3);
    return m;
  };
  const Real s2 = sqrt(Real(2L, prec));
  std::vector<Real> x{Real(3L, prec) - 2 * s2, Real(3L, prec) + 2 * s2};
  const Real tol = ldexp(one, -static_cast<long>(prec) + 8);
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t.to_double()) / 0.005)));
  Real res(0L, prec);
  try {
    for (long i = 1; i <= steps; ++i) {
      t_cur = t * i / steps;
      // Convergence is only linear at the fold, hence the generous cap.
      auto r = newton_solve<Real>(F, x, tol, 4 * static_cast<int>(prec), J);
      x = r.root;
      res = r.residual;
    }
  } catch (const NumericError& e) {
    throw NumericError(ErrorCode::Diverged, std::string("endpoint system: ") + e.what());
  }
  EquilibriumData d;
  d.t = t;
  d.a = x[0];
  d.b = x[1];
  d.c = t / sqrt(d.a * d.b);
  d.residual = res;
  d.positive = d.a + d.c >= -ldexp(one, -static_cast<long>(prec) / 2 + 8);
  return d;
}

SignedMeasureData solve_signed(const Real& t_in, Bits prec) {
  const Real t(t_in, prec);
  const Real one(1L, prec);
  const auto cc = critical_constants(prec);
  const Real& a = cc.a_cr;
  Real t_cur(cc.t_cr, prec);
  auto inner = [&](const Real& b) { return one - t_cur / (2 * a) + t_cur / (2 * b); };
  SystemFn<Real> F = [&](const std::vector<Real>& x) -> std::vector<Real> {
    const Real& b = x[0];
    if (!(b > a)) return {ldexp(one, 100)};
    return {sqrt(a / b) * inner(b) + (b - a) / 2L - Real(3L, prec)};
  };
  JacobianFn<Real> J = [&](const std::vector<Real>& x) {
    const Real& b = x[0];
    Real r = sqrt(a / b);
    Mat<Real> m(1, 1);
    m(0, 0) = -r / (2 * b) * inner(b) - r * t_cur / (2 * b * b) + one / 2L;
    return m;
  };
  std::vector<Real> x{cc.b_cr};
  const Real tol = ldexp(one, -static_cast<long>(prec) + 8);
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs((t - cc.t_cr).to_double()) / 0.005)));
  Real res(0L, prec);
  try {
    for (long i = 1; i <= steps; ++i) {
      t_cur = cc.t_cr + (t - cc.t_cr) * i / steps;
      auto r = newton_solve<Real>(F, x, tol, 80, J);
      x = r.root;
      res = r.residual;
    }
  } catch (const NumericError& e) {
    throw NumericError(ErrorCode::Diverged, std::string("signed measure: ") + e.what());
  }
  SignedMeasureData s;
  s.t = t;
  s.b = x[0];
  Real r = sqrt(a / s.b);
  s.d0 = -t * r;
  s.d1 = -r * (one - t / (2 * a) + t / (2 * s.b));
  s.residual = res;
  return s;
}

Real regular_density(const EquilibriumData& e, const Real& x) {
  if (x < e.a || x > e.b) throw NumericError(ErrorCode::Domain, "x outside [a, b]");
  return (x + e.c) / (2 * pi(x.prec()) * x * x) * sqrt((x - e.a) * (e.b - x));
}

Real signed_density(const SignedMeasureData& s, const CriticalConstants& cc, const Real& x) {
  if (!(x > cc.a_cr) || x > s.b) throw NumericError(ErrorCode::Domain, "x outside (a_cr, b]");
  Real w = x - cc.a_cr;
  Real e1 = 2 * cc.a_cr + s.d1;
  Real e0 = cc.a_cr * cc.a_cr + s.d1 * cc.a_cr + s.d0;
  return sqrt((s.b - x) / w) * (w * w + e1 * w + e0) / (2 * pi(x.prec()) * x * x);
}

Real critical_density(const CriticalConstants& cc, const Real& x) {
  if (x < cc.a_cr || x > cc.b_cr) throw NumericError(ErrorCode::Domain, "x outside [a_cr, b_cr]");
  Real w = x - cc.a_cr;
  return sqrt(w * w * w * (cc.b_cr - x)) / (2 * pi(x.prec()) * x * x);
}

Real density(const Real& x_in, const Real& t, DensityMode mode, Bits prec) {
  const Real x(x_in, prec);
  switch (mode) {
    case DensityMode::Regular: return regular_density(solve_endpoints(t, prec), x);
    case DensityMode::Signed: return signed_density(solve_signed(t, prec), critical_constants(prec), x);
    case DensityMode::Critical: return critical_density(critical_constants(prec), x);
  }
  return Real(0L, prec);
}

Real density_mass(const Real& t, DensityMode mode, Bits prec) {
  const Real half_pi = pi(prec) / 2L;
  const Real zero(0L, prec);
  const Real two_pi = 2 * pi(prec);
  std::function<Complex(const Real&)> f;
  EquilibriumData e;
  SignedMeasureData s;
  const auto cc = critical_constants(prec);
  // x = a + (b - a) sin^2 phi absorbs both endpoint roots.
  switch (mode) {
    case DensityMode::Regular:
      e = solve_endpoints(t, prec);
      f = [&](const Real& ph) {
        Real sn = sin(ph), cs = cos(ph);
        Real L = e.b - e.a;
        Real x = e.a + L * sn * sn;
        return Complex((x + e.c) * 2 * L * L * sn * sn * cs * cs / (two_pi * x * x));
      };
      break;
    case DensityMode::Signed:
      s = solve_signed(t, prec);
      f = [&](const Real& ph) {
        Real sn = sin(ph), cs = cos(ph);
        Real L = s.b - cc.a_cr;
        Real w = L * sn * sn;
        Real x = cc.a_cr + w;
        Real e1 = 2 * cc.a_cr + s.d1;
        Real e0 = cc.a_cr * cc.a_cr + s.d1 * cc.a_cr + s.d0;
        return Complex((w * w + e1 * w + e0) * 2 * L * cs * cs / (two_pi * x * x));
      };
      break;
    case DensityMode::Critical:
      f = [&](const Real& ph) {
        Real sn = sin(ph), cs = cos(ph);
        Real L = cc.b_cr - cc.a_cr;
        Real x = cc.a_cr + L * sn * sn;
        Real s2 = sn * sn;
        return Complex(2 * L * L * L * s2 * s2 * cs * cs / (two_pi * x * x));
      };
      break;
  }
  return integrate(f, zero, half_pi, prec).real();
}

GFunction::GFunction(SignedMeasureData sd, CriticalConstants cc, Bits prec)
    : sd_(std::move(sd)), cc_(std::move(cc)), prec_(prec) {}

namespace {

// psi_t(s) ds in the angle variable s = a + (b - a) sin^2 phi.
struct AngleMeasure {
  Real a, b, e1, e0;
  Real L;
  AngleMeasure(const SignedMeasureData& sd, const CriticalConstants& cc)
      : a(cc.a_cr),
        b(sd.b),
        e1(2 * cc.a_cr + sd.d1),
        e0(cc.a_cr * cc.a_cr + sd.d1 * cc.a_cr + sd.d0),
        L(sd.b - cc.a_cr) {}
  Real point(const Real& ph) const {
    Real sn = sin(ph);
    return a + L * sn * sn;
  }
  Real weight(const Real& ph) const {
    Real sn = sin(ph), cs = cos(ph);
    Real w = L * sn * sn;
    Real s = a + w;
    return (w * w + e1 * w + e0) * L * cs * cs / (pi(ph.prec()) * s * s);
  }
};

}  // namespace

Complex GFunction::operator()(const Complex& z) const {
  if (z.imag().is_zero() && z.real() <= sd_.b) throw NumericError(ErrorCode::BranchCut, "g evaluated on (-inf, b]");
  AngleMeasure m(sd_, cc_);
  return integrate([&](const Real& ph) { return log(z - m.point(ph)) * m.weight(ph); }, Real(0L, prec_),
                   pi(prec_) / 2L, prec_);
}

Complex GFunction::derivative(const Complex& z) const {
  if (z.imag().is_zero() && z.real() >= cc_.a_cr && z.real() <= sd_.b)
    throw NumericError(ErrorCode::BranchCut, "g' evaluated on the support");
  AngleMeasure m(sd_, cc_);
  return integrate([&](const Real& ph) { return m.weight(ph) / (z - m.point(ph)); }, Real(0L, prec_),
                   pi(prec_) / 2L, prec_);
}

Real GFunction::log_potential(const Real& x_in) const {
  const Real x(x_in, prec_);
  if (!(x > 0)) throw NumericError(ErrorCode::Domain, "log potential needs x > 0");
  AngleMeasure m(sd_, cc_);
  const Real zero(0L, prec_), top = pi(prec_) / 2L;
  if (x <= m.a || x >= m.b)
    return integrate([&](const Real& ph) { return Complex(log(abs(x - m.point(ph))) * m.weight(ph)); }, zero, top,
                     prec_)
        .real();
  // x - s = L sin(phx - ph) sin(phx + ph) keeps the log accurate at the split.
  Real phx = atan2(sqrt(x - m.a), sqrt(m.b - x));
  auto f = [&](const Real& ph) {
    Real d = m.L * sin(phx - ph) * sin(phx + ph);
    if (d.is_zero()) return Complex(Real(0L, prec_));
    return Complex(log(abs(d)) * m.weight(ph));
  };
  return integrate(f, zero, phx, prec_, EndpointHint::End).real() +
         integrate(f, phx, top, prec_, EndpointHint::Start).real();
}

Real GFunction::euler_lagrange(const Real& x, const Real& l) const {
  return 2 * log_potential(x) - potential(Real(x, prec_), sd_.t) - l;
}

GAndL g_and_l(const Real& t, Bits prec) {
  const auto cc = critical_constants(prec);
  GAndL out{GFunction(solve_signed(t, prec), cc, prec), Real(0L, prec), {}, {}, Real(0L, prec)};
  const Real& a = cc.a_cr;
  const Real L = out.g.data().b - a;
  const Real zero(0L, prec);
  for (const char* f : {"0.1", "0.3", "0.5", "0.7", "0.9"}) {
    Real x = a + L * Real(f, prec);
    out.sample_x.push_back(x);
    out.sample_l.push_back(out.g.euler_lagrange(x, zero));
  }
  out.l = out.sample_l[2];
  for (const auto& v : out.sample_l) out.spread = max(out.spread, abs(v - out.l));
  return out;
}

PhiMaps::PhiMaps(const Real& t, Bits prec) : t_(t, prec), prec_(prec), cc_(critical_constants(prec)) {
  sd_ = solve_signed(t_, prec);
  e1_ = 2 * cc_.a_cr + sd_.d1;
  e0_ = cc_.a_cr * cc_.a_cr + sd_.d1 * cc_.a_cr + sd_.d0;
  f_scale_ = pow(cc_.b_cr - cc_.a_cr, Real(1L, prec) / 5L) * pow(2 * cc_.a_cr, Real(-4L, prec) / 5L);
}

// (1/2) int_{a_cr}^z P(s) (s - b)^{1/2} / (s^2 (s - a_cr)^{1/2}) ds with
// P = w^2 + e1 w + e0, w = s - a_cr, on the straight segment.
Complex PhiMaps::phi_generic(const Complex& z_in, Side side, const Real& b, const Real& e1, const Real& e0) const {
  const Complex z(Real(z_in.real(), prec_), Real(z_in.imag(), prec_));
  const Real& a = cc_.a_cr;
  if (z.imag().is_zero() && z.real().sign() <= 0)
    throw NumericError(ErrorCode::BranchCut, "phi evaluated on (-inf, 0]");
  const Real zero(0L, prec_), one(1L, prec_);
  if (z.imag().is_zero() && z.real() == a) return Complex(zero);
  auto P = [&](const Complex& w) { return w * w + e1 * w + e0; };
  if (on_positive_axis_right_of(z, b)) {
    const Real L = b - a;
    // a_cr to b, substitution w = L u^2; root singularity of (s - b)^{1/2} at u = 1.
    Complex first = sqrt02(Complex(L), side) * integrate(
                                                    [&](const Real& u) {
                                                      Real w = L * u * u;
                                                      Real s = a + w;
                                                      Complex sb = sqrt02(Complex(s - b), side);
                                                      return P(Complex(w)) * sb / (s * s);
                                                    },
                                                    zero, one, prec_, EndpointHint::End);
    // b to x, substitution s = b + (x - b) v^2.
    const Real D = z.real() - b;
    Complex rd = sqrt02(Complex(D), side);
    Complex second = integrate(
        [&](const Real& v) {
          Real s = b + D * v * v;
          return P(Complex(s - a)) * v * v * D * rd / (s * s * sqrt02(Complex(s - a), side));
        },
        zero, one, prec_);
    return first + second;
  }
  const Complex dz = z - a;
  Complex root = sqrt02(dz, side);
  return root * integrate(
                    [&](const Real& u) {
                      Complex w = dz * (u * u);
                      Complex s = a + w;
                      return P(w) * sqrt02(s - b, side) / (s * s);
                    },
                    zero, one, prec_);
}

Complex PhiMaps::phi_t(const Complex& z, Side side) const { return phi_generic(z, side, sd_.b, e1_, e0_); }

Complex PhiMaps::phi_cr(const Complex& z, Side side) const {
  const Real zero(0L, prec_);
  return phi_generic(z, side, cc_.b_cr, zero, zero);
}

Complex PhiMaps::phi_0(const Complex& z, Side side) const {
  if (t_ == cc_.t_cr) throw NumericError(ErrorCode::Domain, "phi_0 is a difference quotient, undefined at t_cr");
  return (phi_t(z, side) - phi_cr(z, side)) / (t_ - cc_.t_cr);
}

Complex PhiMaps::phi_cr_reduced(const Complex& z) const {
  const Real& a = cc_.a_cr;
  const Complex dz = Complex(Real(z.real(), prec_), Real(z.imag(), prec_)) - a;
  return integrate(
      [&](const Real& u) {
        Real u2 = u * u;
        Complex s = a + dz * u2;
        return u2 * u2 * sqrt02(s - cc_.b_cr, Side::Upper) / (s * s);
      },
      Real(0L, prec_), Real(1L, prec_), prec_);
}

Complex PhiMaps::f(const Complex& z_in) const {
  const Complex z(Real(z_in.real(), prec_), Real(z_in.imag(), prec_));
  const Real& a = cc_.a_cr;
  if (z.imag().is_zero() && z.real().sign() <= 0) throw NumericError(ErrorCode::BranchCut, "f evaluated on (-inf, 0]");
  // phi_cr = i (a - z)^{5/2} I(z) with the principal root, so
  // f = C (a - z) (-(5/4) i I / C^{5/2})^{2/5} tends to -C (z - a).
  Complex ratio = imag_unit(prec_) * phi_cr_reduced(z) * Real(-5L, prec_) / 4L / pow(f_scale_, Real(5L, prec_) / 2L);
  return f_scale_ * (a - z) * pow(ratio, Real(2L, prec_) / 5L);
}

Real PhiMaps::q_at_a() const {
  const Real& a = cc_.a_cr;
  return e0_ * sqrt(sd_.b - a) / (a * a * sqrt(f_scale_));
}

Complex PhiMaps::q(const Complex& z_in) const {
  const Complex z(Real(z_in.real(), prec_), Real(z_in.imag(), prec_));
  if (z.imag().is_zero() && z.real() == cc_.a_cr) return Complex(q_at_a());
  if (on_positive_axis_right_of(z, cc_.a_cr)) throw NumericError(ErrorCode::BranchCut, "q evaluated on (a_cr, inf)");
  return -(phi_t(z) - phi_cr(z)) / sqrt(f(z));
}

Real PhiMaps::s_star(int n) const { return pow(Real(static_cast<long>(n), prec_), Real(4L, prec_) / 5L) * q_at_a(); }

Complex PhiMaps::phi_cr_local_ratio(const Complex& z) const {
  const Real& a = cc_.a_cr;
  Complex r = sqrt02(Complex(Real(z.real(), prec_), Real(z.imag(), prec_)) - a, Side::Upper);
  Complex lead = sqrt(cc_.b_cr - a) * r * r * r * r * r * imag_unit(prec_) / (5 * a * a);
  return phi_cr(z) / lead;
}

Complex PhiMaps::phi_0_local_ratio(const Complex& z) const {
  const Real& a = cc_.a_cr;
  const Real& b = cc_.b_cr;
  Complex r = sqrt02(Complex(Real(z.real(), prec_), Real(z.imag(), prec_)) - a, Side::Upper);
  Complex lead = -imag_unit(prec_) * sqrt(b - a) / (2 * a * sqrt(a * b)) * r;
  return phi_0(z) / lead;
}

Complex theta_phase(const Complex& zeta, const Complex& s) {
  Complex r = sqrt(zeta);
  Complex r5 = r * r * r * r * r;
  return r5 * Real(4L, zeta.real().prec()) / 5L + s * r;
}

Real PhiMaps::theta_relation_residual(const Complex& z, int n) const {
  const Real nn(static_cast<long>(n), prec_);
  Complex zeta = pow(nn, Real(2L, prec_) / 5L) * f(z);
  Complex s = pow(nn, Real(4L, prec_) / 5L) * q(z);
  Complex nphi = nn * phi_t(z);
  return abs(theta_phase(zeta, s) + nphi) / (1 + abs(nphi));
}

std::string SignRegionReport::csv() const {
  std::ostringstream os;
  os << "x,y,sign\n";
  for (const auto& c : cells) os << c.x.str(12) << ',' << c.y.str(12) << ',' << c.sign << '\n';
  return os.str();
}

namespace {

std::vector<double> stretched(double lo, double center, double hi, int count, double sigma) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    double u = count == 1 ? 0.0 : -1.0 + 2.0 * i / (count - 1);
    double g = sigma > 0 ? std::sinh(sigma * u) / std::sinh(sigma) : u;
    out.push_back(g < 0 ? center + (center - lo) * g : center + (hi - center) * g);
  }
  return out;
}

}  // namespace

SignRegionReport sign_region_check(const Real& t, const SignGridSpec& grid, Bits prec, bool strict) {
  PhiMaps pm(t, prec);
  const auto& cc = pm.constants();
  const Real& a = cc.a_cr;
  const Real b = pm.signed_data().b;
  SignRegionReport rep;
  rep.t = Real(t, prec);
  rep.theta_residual = Real(0L, prec);
  const Real tiny = ldexp(Real(1L, prec), -static_cast<long>(prec) / 2);

  auto fail = [&](const std::string& what, const Complex& z, const Real& value) {
    std::string msg = what + " at z = " + z.real().str(12) + (z.imag().sign() < 0 ? " - " : " + ") +
                      abs(z.imag()).str(12) + "i, value " + value.str(8);
    rep.failures.push_back(msg);
    if (strict) throw NumericError(ErrorCode::AssertionFailed, msg);
  };

  // Circle |z - delta| = delta through 0 and a_cr, away from both ends.
  const Real delta = a / 2L;
  for (int k = 2; k <= 11; ++k) {
    Real th = pi(prec) * static_cast<long>(k) / 12L;
    for (int sgn : {1, -1}) {
      Complex z = delta + delta * Complex(cos(th), sin(th) * static_cast<long>(sgn));
      Real re = pm.phi_t(z).real();
      ++rep.checks;
      if (!(re > 0)) fail("Re phi_t <= 0 on the circle", z, re);
    }
  }
  // Right of b.
  for (const char* d : {"0.1", "0.5", "1", "3", "10"}) {
    Complex z(b + Real(d, prec));
    Real re = pm.phi_t(z).real();
    ++rep.checks;
    if (!(re > 0)) fail("Re phi_t <= 0 right of b", z, re);
  }
  // Just above and below the support, away from its ends.
  const Real eps("1e-4", prec);
  for (const char* f : {"0.05", "0.2", "0.4", "0.6", "0.8", "0.95"}) {
    Real x = a + (b - a) * Real(f, prec);
    for (int sgn : {1, -1}) {
      Complex z(x, eps * static_cast<long>(sgn));
      Real re = pm.phi_t(z).real();
      ++rep.checks;
      if (!(re < 0)) fail("Re phi_t >= 0 next to the support", z, re);
    }
  }
  // Re phi_cr increases along the upper circle away from a_cr.
  Real prev(0L, prec);
  for (int k = 1; k <= 23; ++k) {
    Real th = pi(prec) * static_cast<long>(k) / 24L;
    Complex z = delta + delta * Complex(cos(th), sin(th));
    Real re = pm.phi_cr(z).real();
    ++rep.checks;
    if (!(re > prev)) fail("Re phi_cr not increasing along the circle", z, re);
    prev = re;
  }
  // theta(n^{2/5} f, n^{4/5} q) = -n phi_t near a_cr.
  const Real rho = a / 10L;
  for (int k : {1, 2, 3, 4, 6, 7}) {
    Real om = pi(prec) * static_cast<long>(k) / 4L;
    Complex z = a + rho * Complex(cos(om), sin(om));
    Real r = pm.theta_relation_residual(z, 100);
    rep.theta_residual = max(rep.theta_residual, r);
    ++rep.checks;
    if (!(r < Real("1e-10", prec))) fail("theta relation violated", z, r);
  }

  const double ad = a.to_double();
  auto xs = stretched(grid.x_min, ad, grid.x_max, grid.nx, grid.stretch);
  for (int j = 0; j < grid.ny; ++j) {
    double v = (2.0 * j + 1.0 - grid.ny) / grid.ny;
    if (v == 0.0) continue;
    double y = grid.y_max * (grid.stretch > 0 ? std::sinh(grid.stretch * v) / std::sinh(grid.stretch) : v);
    for (double x : xs) {
      Complex z(Real(x, prec), Real(y, prec));
      Real re = pm.phi_t(z).real();
      int sg = abs(re) < tiny ? 0 : re.sign();
      rep.cells.push_back({Real(x, prec), Real(y, prec), sg});
    }
  }
  return rep;
}

}  // namespace pertlag
