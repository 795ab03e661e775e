#include "pertlag/weight_contour.hpp"

#include <cmath>
#include <sstream>

#include "pertlag/numkernel/error.hpp"

namespace pertlag {

void WeightParams::validate() const {
  if (n < 1) throw NumericError(ErrorCode::Domain, "n must be at least 1");
  if (!(delta > 0)) throw NumericError(ErrorCode::Domain, "delta must be positive");
}

Complex branch_constant(Branch b, const WeightParams& p) {
  const Bits prec = std::max(p.alpha.prec(), p.t.prec());
  switch (b) {
    case Branch::Ray: return Complex(Real(1L, prec), Real(0L, prec));
    case Branch::Upper: return p.alpha;
    case Branch::Lower: return Complex(Real(1L, prec)) - p.alpha;
  }
  return Complex(Real(1L, prec));
}

Complex eval_weight(const Complex& z, Branch b, const WeightParams& p) {
  if (z.imag().is_zero() && z.real().sign() <= 0)
    throw NumericError(ErrorCode::BranchCut, "weight evaluated on (-inf, 0]");
  // V_t(z) = z - log z + t/z
  Complex v = z - log(z) + p.t / z;
  return branch_constant(b, p) * exp(-v * static_cast<long>(p.n));
}

namespace {

// log of max_x x^m e^{-n x - n t / x} over the part of the ray [x0, inf).
double log_peak(int m, int n, double t, double x0) {
  double disc = static_cast<double>(m) * m + 4.0 * n * n * t;
  double xs = disc >= 0 ? (m + std::sqrt(disc)) / (2.0 * n) : x0;
  if (xs < x0) xs = x0;
  auto f = [&](double x) { return (m == 0 ? 0.0 : m * std::log(x)) - n * x - n * t / x; };
  return std::max(f(xs), f(x0));
}

// log of the tail bound int_R^inf x^m e^{-n x - n t / x} dx for R > m / n.
double log_tail(int m, int n, double t, double R) {
  double growth = t < 0 ? -n * t / R : 0.0;
  return growth + m * std::log(R) - n * R - std::log(n - m / R);
}

}  // namespace

Real ray_cutoff(const WeightParams& p, int jmax, double log2_tol) {
  const int n = p.n;
  const double t = p.t.to_double();
  const double x0 = 2.0 * p.delta.to_double();
  const double ltol = log2_tol * std::log(2.0);
  double R = std::max(2.0 * x0, 1.0);
  for (int j = -1; j <= jmax; ++j) {
    const int m = n + j;
    double r = std::max(R, (m + 1.0) / n + 1.0);
    const double scale = log_peak(m, n, t, x0);
    while (log_tail(m, n, t, r) - scale > ltol) r *= 1.05;
    R = std::max(R, r);
  }
  // Round up to a multiple of 1/16 so the cutoff is exactly representable.
  R = std::ceil(R * 16.0) / 16.0;
  return Real(R, std::max(p.t.prec(), p.delta.prec()));
}

Contour build_contour(const WeightParams& p, int jmax, const Real& truncation_tol) {
  p.validate();
  const Bits prec = std::max(p.t.prec(), p.delta.prec());
  const Real& d = p.delta;
  Complex center(d, Real(0L, prec));
  Contour c;
  double l2 = (log(truncation_tol) / ln2(prec)).to_double();
  c.cutoff = ray_cutoff(p, jmax, l2);
  const Real pi_ = pi(prec);
  // Both semicircles run from 0 (angle pi) to 2 delta (angle 0 or 2 pi).
  c.pieces.push_back({PathSegment<Real>::arc(center, d, pi_, Real(0L, prec)), branch_constant(Branch::Upper, p),
                      Branch::Upper, EndpointHint::Start});
  c.pieces.push_back({PathSegment<Real>::arc(center, d, pi_, 2 * pi_), branch_constant(Branch::Lower, p),
                      Branch::Lower, EndpointHint::Start});
  c.pieces.push_back({PathSegment<Real>::line(Complex(2 * d, Real(0L, prec)), Complex(c.cutoff, Real(0L, prec))),
                      branch_constant(Branch::Ray, p), Branch::Ray, EndpointHint::None});
  return c;
}

Contour moment_path(const WeightParams& p, int jmax, Bits prec) {
  p.validate();
  WeightParams q = p;
  q.t = Real(p.t, prec);
  q.delta = Real(p.delta, prec);
  const Real zero(0L, prec);
  const Real two_d = 2 * q.delta;
  Contour c;
  c.cutoff = ray_cutoff(q, jmax, -static_cast<double>(prec) - 8.0);
  const Complex one = branch_constant(Branch::Ray, q);
  if (q.t.sign() >= 0) {
    // Both semicircles collapse onto [0, 2 delta] with total constant 1.
    c.pieces.push_back({PathSegment<Real>::line(Complex(zero, zero), Complex(two_d, zero)), one, Branch::Ray,
                        EndpointHint::Start});
  } else {
    // Common stem along the negative axis, where e^{-nt/z} decays as z -> 0,
    // then the two halves of |z| = 2 delta with their own constants.
    const Real pi_ = pi(prec);
    c.pieces.push_back({PathSegment<Real>::line(Complex(zero, zero), Complex(-two_d, zero)), one, Branch::Ray,
                        EndpointHint::Start});
    c.pieces.push_back({PathSegment<Real>::arc(Complex(zero, zero), two_d, pi_, zero),
                        branch_constant(Branch::Upper, q), Branch::Upper, EndpointHint::None});
    c.pieces.push_back({PathSegment<Real>::arc(Complex(zero, zero), two_d, -pi_, zero),
                        branch_constant(Branch::Lower, q), Branch::Lower, EndpointHint::None});
  }
  c.pieces.push_back({PathSegment<Real>::line(Complex(two_d, zero), Complex(c.cutoff, zero)), one, Branch::Ray,
                      EndpointHint::None});
  return c;
}

namespace {

// Rough log-magnitude of mu_j, used to set absolute quadrature tolerances.
double log_moment_scale(int m, int n, double t, double x0) {
  if (t >= 0) return log_peak(m, n, t, 1e-300);
  return log_peak(m, n, t, x0);
}

}  // namespace

MomentTable moment_table(const WeightParams& p, int jmax, Bits prec) {
  p.validate();
  if (jmax < 0) throw NumericError(ErrorCode::Domain, "jmax must be non-negative");
  const Contour path = moment_path(p, jmax, prec);
  const int n = p.n;
  const Real t(p.t, prec);
  const std::size_t m = static_cast<std::size_t>(jmax) + 2;  // j = -1..jmax

  const Real unit(1L, prec);
  const Real tol = ldexp(unit, -static_cast<long>(prec) + 16);
  QuadratureSpec<Real> spec{tol, tol, 16, EndpointHint::None, 0.0, {}};
  const double td = t.to_double(), x0 = 2.0 * p.delta.to_double();
  for (std::size_t i = 0; i < m; ++i) {
    double ls = log_moment_scale(n + static_cast<int>(i) - 1, n, td, x0);
    spec.component_abs_tol.push_back(tol * exp(Real(ls, prec)));
  }

  MomentTable table;
  table.params = p;
  table.prec = prec;
  std::vector<Complex> total(m, Complex(Real(0L, prec), Real(0L, prec)));
  std::vector<Real> err(m, Real(0L, prec));
  bool converged = true;
  for (const auto& piece : path.pieces) {
    const Complex cst = piece.constant;
    // acc[i] += scale * c * z^{n-1+i} e^{-n z - n t / z}
    VecIntegrand<Real> f = [&](const Complex& z, const Complex& scale, std::span<Complex> acc) {
      Complex e = exp(-(z + t / z) * static_cast<long>(n));
      Complex term = scale * cst * e;
      if (n > 1) term *= pow(z, static_cast<long>(n - 1));
      for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += term;
        if (i + 1 < acc.size()) term *= z;
      }
    };
    QuadratureSpec<Real> s = spec;
    s.hint = piece.hint;
    s.decay_exponent = static_cast<double>(n - 1);
    auto r = quad_segment_vec<Real>(f, m, piece.seg, s);
    table.evaluations += r.evaluations;
    converged = converged && r.converged;
    for (std::size_t i = 0; i < m; ++i) {
      total[i] += r.values[i];
      err[i] += r.errors[i];
    }
  }
  table.inverse = {-1, total[0], err[0]};
  for (std::size_t i = 1; i < m; ++i) table.entries.push_back({static_cast<int>(i) - 1, total[i], err[i]});
  if (!converged) {
    std::ostringstream os;
    os << "moment quadrature did not converge; best mu_0 = " << total[1].real().str(20) << " + i "
       << total[1].imag().str(20) << ", err " << err[1].str(5);
    throw NumericError(ErrorCode::Nonconvergence, os.str());
  }
  return table;
}

Complex moment(int j, const WeightParams& p, Bits prec) {
  if (j < 0) throw NumericError(ErrorCode::Domain, "moment index must be non-negative");
  return moment_table(p, j, prec).mu(j);
}

Complex weighted_integral(const WeightParams& p, int degree, Bits prec,
                          const std::function<Complex(const Complex&)>& g) {
  p.validate();
  const Contour path = moment_path(p, std::max(degree, 0), prec);
  const int n = p.n;
  const Real t(p.t, prec);
  const Real tol = ldexp(Real(1L, prec), -static_cast<long>(prec) + 16);
  Complex total(Real(0L, prec), Real(0L, prec));
  for (const auto& piece : path.pieces) {
    const Complex cst = piece.constant;
    ScalarIntegrand<Real> f = [&](const Complex& z) {
      return cst * g(z) * exp(-(z + t / z) * static_cast<long>(n)) * pow(z, static_cast<long>(n));
    };
    QuadratureSpec<Real> s{tol, tol, 18, piece.hint, static_cast<double>(n), {}};
    auto r = quad_segment<Real>(f, piece.seg, s);
    if (!r.converged) throw NumericError(ErrorCode::Nonconvergence, "weighted contour integral did not converge");
    total += r.value;
  }
  return total;
}

Real bessel_k(const Real& nu, const Real& x, Bits prec) {
  if (!(x > 0)) throw NumericError(ErrorCode::Domain, "bessel_k needs x > 0");
  const double nd = nu.to_double(), xd = x.to_double();
  // Integrand e^{-x cosh u + nu u} (the e^{-nu u} half is negligible past the
  // peak but kept for accuracy), peak at sinh u = nu / x.
  const double us = std::asinh(nd / xd);
  auto g = [&](double u) { return -xd * std::cosh(u) + nd * u; };
  const double drop = (static_cast<double>(prec) + 40.0) * std::log(2.0);
  double U = us + 1.0;
  while (g(U) > g(us) - drop) U += 0.25;
  const Real zero(0L, prec);
  const Real tol = ldexp(Real(1L, prec), -static_cast<long>(prec) + 12);
  QuadratureSpec<Real> spec{tol * exp(Real(g(us), prec)), tol, 20, EndpointHint::None, 0.0, {}};
  ScalarIntegrand<Real> f = [&](const Complex& u) { return Complex(exp(-x * cosh(u.real())) * cosh(nu * u.real())); };
  Real total(0L, prec);
  Real split(std::round(us * 16.0) / 16.0, prec);
  std::vector<std::pair<Real, Real>> parts;
  if (split > 0) parts.emplace_back(zero, split);
  parts.emplace_back(split > 0 ? split : zero, Real(std::ceil(U), prec));
  for (const auto& [a, b] : parts) {
    auto r = quad_segment<Real>(f, PathSegment<Real>::line(Complex(a), Complex(b)), spec);
    if (!r.converged) throw NumericError(ErrorCode::Nonconvergence, "Bessel K quadrature did not converge");
    total += r.value.real();
  }
  return total;
}

Real moment_oracle(int j, const WeightParams& p, Bits prec) {
  if (!(p.t > 0)) throw NumericError(ErrorCode::Domain, "Bessel oracle needs t > 0");
  const Real t(p.t, prec);
  const Real nu(static_cast<long>(p.n + j + 1), prec);
  const Real x = 2 * sqrt(t) * static_cast<long>(p.n);
  return 2 * pow(t, nu / 2) * bessel_k(nu, x, prec);
}

}  // namespace pertlag
