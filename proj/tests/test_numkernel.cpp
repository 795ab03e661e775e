#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pertlag/numkernel/certify.hpp"
#include "pertlag/numkernel/finite_diff.hpp"
#include "pertlag/numkernel/newton.hpp"
#include "pertlag/numkernel/quadrature.hpp"
#include "pertlag/numkernel/taylor_ode.hpp"

using namespace pertlag;

namespace {

QuadratureSpec<Real> qspec(Bits p, EndpointHint hint = EndpointHint::None) {
  Real tol = ldexp(Real(1L, p), -static_cast<long>(p) + 12);
  return {tol, tol, 18, hint, 0.0};
}

}  // namespace

TEST_CASE("precision follows the wider operand") {
  Real a(1L, 256), b(3L, 128);
  Real q = a / b;
  CHECK(q.prec() == 256);
  Real small = Real(1) / 3;  // exact integers carry only 64 bits
  CHECK(small.prec() == Real::kExactBits);
  Real third = Real(1L, 512) / 3;
  CHECK(third.prec() == 512);
  CHECK(abs(third * 3 - 1) < ldexp(Real(1L, 512), -500));
}

TEST_CASE("decimal round trip") {
  Real x = pi(300);
  Real y(x.str(), 300);
  CHECK(x == y);
  CHECK(Real("0.1", 200).str(5) == "1.0000e-01");
}

TEST_CASE("complex principal branches") {
  const Bits p = 200;
  Complex m1(Real(-1L, p), Real(0L, p));
  Complex s = sqrt(m1);
  CHECK(abs(s.real()) < 1e-50);
  CHECK(abs(s.imag() - 1) < 1e-50);
  Complex l = log(Complex(Real(-1L, p), Real(1e-30, p)));
  CHECK(abs(l.imag() - pi(p)) < 1e-25);
  Complex w = pow(Complex(Real(0L, p), Real(2L, p)), 5L);  // (2i)^5 = 32i
  CHECK(abs(w.real()) < 1e-50);
  CHECK(abs(w.imag() - 32) < 1e-50);
}

TEST_CASE("quad_segment: constant on a line") {
  const Bits p = 256;
  auto seg = PathSegment<Real>::line(Complex(Real(0L, p)), Complex(Real(1L, p)));
  auto r = quad_segment<Real>([p](const Complex&) { return Complex(Real(1L, p)); }, seg, qspec(p));
  CHECK(r.converged);
  CHECK(abs(r.value - Complex(Real(1L, p))) < 1e-70);
}

TEST_CASE("quad_segment: 1/z over the upper semicircle gives i pi") {
  const Bits p = 256;
  auto seg = PathSegment<Real>::arc(Complex(Real(0L, p)), Real(1L, p), Real(0L, p), pi(p));
  auto r = quad_segment<Real>([](const Complex& z) { return Complex(Real(1L, 256)) / z; }, seg, qspec(p));
  CHECK(r.converged);
  CHECK(abs(r.value.real()) < 1e-70);
  CHECK(abs(r.value.imag() - pi(p)) < 1e-70);
}

TEST_CASE("quad_segment: truncated exponential tail") {
  const Bits p = 256;
  const Real R(200L, p);
  auto seg = PathSegment<Real>::line(Complex(Real(0L, p)), Complex(R));
  auto r = quad_segment<Real>([](const Complex& z) { return exp(-z); }, seg, qspec(p));
  CHECK(r.converged);
  // Closed form 1 - e^{-R}; the remaining tail e^{-R} is below 2^{-256}.
  Real exact = 1 - exp(-R);
  CHECK(abs(r.value.real() - exact) < ldexp(Real(1L, p), -240));
  CHECK(abs(r.value.real() - 1) < ldexp(Real(1L, p), -240));
}

TEST_CASE("tanh-sinh handles an algebraic endpoint") {
  const Bits p = 256;
  auto seg = PathSegment<Real>::line(Complex(Real(0L, p)), Complex(Real(1L, p)));
  auto r = quad_segment<Real>([](const Complex& z) { return sqrt(z); }, seg, qspec(p, EndpointHint::Start));
  CHECK(r.converged);
  CHECK(abs(r.value.real() - Real(2L, p) / 3) < 1e-70);
}

TEST_CASE("quadrature is additive and reversal negates exactly") {
  const Bits p = 192;
  auto f = [](const Complex& z) { return exp(z * z) * cos(z.real()); };
  ScalarIntegrand<Real> g = [&f](const Complex& z) { return f(z); };
  Complex a(Real(0L, p)), m(Real(0.3, p), Real(0.2, p)), b(Real(1L, p), Real(1L, p));
  auto whole = quad_segment<Real>(g, PathSegment<Real>::line(a, b), qspec(p));
  Complex mid = (a + b) / 2;
  auto left = quad_segment<Real>(g, PathSegment<Real>::line(a, mid), qspec(p));
  auto right = quad_segment<Real>(g, PathSegment<Real>::line(mid, b), qspec(p));
  CHECK(abs(whole.value - left.value - right.value) <= whole.err + left.err + right.err + ldexp(Real(1L, p), -170));
  auto fwd = quad_segment<Real>(g, PathSegment<Real>::line(a, m), qspec(p));
  auto rev = quad_segment<Real>(g, PathSegment<Real>::line(a, m).reverse(), qspec(p));
  CHECK(fwd.value == -rev.value);
}

TEST_CASE("quadrature is deterministic") {
  const Bits p = 160;
  ScalarIntegrand<Real> g = [](const Complex& z) { return exp(-z * z); };
  auto seg = PathSegment<Real>::line(Complex(Real(-3L, p)), Complex(Real(4L, p)));
  auto r1 = quad_segment<Real>(g, seg, qspec(p));
  auto r2 = quad_segment<Real>(g, seg, qspec(p));
  CHECK(r1.value == r2.value);
  CHECK(r1.err == r2.err);
}

TEST_CASE("quadrature in double precision") {
  auto seg = PathSegment<double>::line(0.0, 2.0);
  QuadratureSpec<double> spec{1e-14, 1e-14, 18, EndpointHint::None, 0.0};
  auto r = quad_segment<double>([](const std::complex<double>& z) { return std::exp(z); }, seg, spec);
  CHECK(r.converged);
  CHECK(std::abs(r.value.real() - (std::exp(2.0) - 1.0)) < 1e-13);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const Bits p = 320;
  auto seg = PathSegment<Real>::line(Complex(Real(-1L, p)), Complex(Real(1L, p)));
  auto r = quad_segment<Real>([](const Complex& z) { return pow(z, 10L); }, seg, qspec(p));
  CHECK(abs(r.value.real() - Real(2L, p) / 11) < ldexp(Real(1L, p), -300));
}

namespace {

TaylorSystem<Real> exponential_system() {
  TaylorSystem<Real> sys;
  sys.dim = 1;
  sys.next = [](const Real&, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& nx) {
    nx[0] = c[0][k] / (k + 1);
  };
  return sys;
}

OdeSpec<Real> ospec(Bits p, double tol) {
  return {Real(tol, p), 30, Real(1e-30, p), Real(0L, p), Real(1e-3, p), 100000};
}

// y'' = 6 y^2 + s as the system (y, v).
TaylorSystem<Real> p1_system() {
  TaylorSystem<Real> sys;
  sys.dim = 2;
  sys.next = [](const Real& s0, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& nx) {
    Real sq = c[0][0] * c[0][k];
    for (int i = 1; i <= k; ++i) sq += c[0][i] * c[0][k - i];
    Real rhs = sq * 6;
    if (k == 0) rhs += s0;
    if (k == 1) rhs += 1;
    nx[0] = c[1][k] / (k + 1);
    nx[1] = rhs / (k + 1);
  };
  return sys;
}

}  // namespace

TEST_CASE("ode_solve: y' = y reaches e") {
  const Bits p = 256;
  auto g = ode_solve<Real>(exponential_system(), {Real(1L, p)}, Real(0L, p), Real(1L, p), ospec(p, 1e-60));
  CHECK(g.status == OdeStatus::Ok);
  auto y = g.eval(Real(1L, p));
  CHECK(abs(y[0] - exp(Real(1L, p))) < 1e-55);
}

TEST_CASE("ode_solve: y'' = 0 is reproduced exactly") {
  const Bits p = 128;
  TaylorSystem<Real> sys;
  sys.dim = 2;
  sys.next = [p](const Real&, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& nx) {
    nx[0] = c[1][k] / (k + 1);
    nx[1] = Real(0L, p);
  };
  auto g = ode_solve<Real>(sys, {Real(0L, p), Real(1L, p)}, Real(0L, p), Real(3L, p), ospec(p, 1e-30));
  CHECK(g.eval(Real(3L, p))[0] == Real(3L, p));
  CHECK(g.eval(Real(1.5, p))[0] == Real(1.5, p));
}

TEST_CASE("ode_solve: y' = y^2 halts at the pole") {
  const Bits p = 128;
  const double tol = 1e-20;
  TaylorSystem<Real> sys;
  sys.dim = 1;
  sys.next = [](const Real&, int k, const std::vector<std::vector<Real>>& c, std::vector<Real>& nx) {
    Real sq = c[0][0] * c[0][k];
    for (int i = 1; i <= k; ++i) sq += c[0][i] * c[0][k - i];
    nx[0] = sq / (k + 1);
  };
  auto g = ode_solve<Real>(sys, {Real(1L, p)}, Real(0L, p), Real(2L, p), ospec(p, tol));
  REQUIRE(g.status == OdeStatus::PoleEncountered);
  CHECK(abs(g.pole_estimate - 1) < 10 * tol);
}

TEST_CASE("ode_solve: Painleve I on a pole-free interval is stable under halved tolerance") {
  const Bits p = 128;
  auto y0 = std::vector<Real>{Real(0.1, p), Real(-0.2, p)};
  auto g1 = ode_solve<Real>(p1_system(), y0, Real(-1L, p), Real(0.5, p), ospec(p, 1e-24));
  auto g2 = ode_solve<Real>(p1_system(), y0, Real(-1L, p), Real(0.5, p), ospec(p, 5e-25));
  REQUIRE(g1.status == OdeStatus::Ok);
  for (double s : {-0.5, 0.0, 0.5}) CHECK(abs(g1.eval(Real(s, p))[0] - g2.eval(Real(s, p))[0]) < 1e-22);
}

TEST_CASE("ode_solve in double precision, backwards") {
  TaylorSystem<double> sys;
  sys.dim = 1;
  sys.next = [](const double&, int k, const std::vector<std::vector<double>>& c, std::vector<double>& nx) {
    nx[0] = c[0][k] / (k + 1);
  };
  OdeSpec<double> spec{1e-15, 20, 1e-12, 0.0, 1e-3, 1000};
  auto g = ode_solve<double>(sys, {1.0}, 0.0, -2.0, spec);
  CHECK(std::abs(g.eval(-2.0)[0] - std::exp(-2.0)) < 1e-13);
  CHECK(std::abs(g.eval(-1.3)[0] - std::exp(-1.3)) < 1e-13);
}

TEST_CASE("newton_solve: square root of two") {
  const Bits p = 256;
  SystemFn<Real> F = [](const std::vector<Real>& x) { return std::vector<Real>{x[0] * x[0] - 2}; };
  auto r = newton_solve<Real>(F, {Real(1L, p)}, ldexp(Real(1L, p), -250));
  CHECK(abs(r.root[0] - sqrt(Real(2L, p))) < ldexp(Real(1L, p), -245));
}

TEST_CASE("newton_solve: linear system in one step") {
  const Bits p = 128;
  SystemFn<Real> F = [](const std::vector<Real>& x) {
    return std::vector<Real>{x[0] * 2 + x[1] - 5, x[0] - x[1] * 3 + 1};
  };
  JacobianFn<Real> J = [p](const std::vector<Real>&) {
    Mat<Real> m(2, 2);
    m(0, 0) = Real(2L, p);
    m(0, 1) = Real(1L, p);
    m(1, 0) = Real(1L, p);
    m(1, 1) = Real(-3L, p);
    return m;
  };
  auto r = newton_solve<Real>(F, {Real(0L, p), Real(0L, p)}, ldexp(Real(1L, p), -120), 60, J);
  CHECK(r.iterations == 1);
  CHECK(abs(r.root[0] - 2) < 1e-30);
  CHECK(abs(r.root[1] - 1) < 1e-30);
}

TEST_CASE("newton_solve: endpoint system at zero perturbation") {
  const Bits p = 256;
  // 1 + t(a+b)/(2ab) = sqrt(ab), (a+b)/2 - t/sqrt(ab) = 3 at t = 0
  SystemFn<Real> F = [](const std::vector<Real>& x) {
    Real r = sqrt(x[0] * x[1]);
    return std::vector<Real>{1 - r, (x[0] + x[1]) / 2 - 3};
  };
  auto r = newton_solve<Real>(F, {Real(0.2, p), Real(5.5, p)}, ldexp(Real(1L, p), -240));
  Real s2 = sqrt(Real(2L, p));
  CHECK(abs(r.root[0] - (3 - 2 * s2)) < 1e-70);
  CHECK(abs(r.root[1] - (3 + 2 * s2)) < 1e-70);
}

TEST_CASE("newton_solve reports divergence") {
  SystemFn<double> F = [](const std::vector<double>& x) { return std::vector<double>{x[0] * x[0] + 1.0}; };
  CHECK_THROWS_AS(newton_solve<double>(F, {1.0}, 1e-12, 20), NumericError);
}

TEST_CASE("finite_diff basics") {
  std::function<double(const double&)> sq = [](const double& x) { return x * x; };
  CHECK(finite_diff<double, double>(sq, 1.0, 1, 0.1).value == doctest::Approx(2.0).epsilon(1e-12));
  std::function<double(const double&)> s = [](const double& x) { return std::sin(x); };
  CHECK(std::abs(finite_diff<double, double>(s, 0.0, 2, 0.1).value) < 1e-12);
}

TEST_CASE("finite_diff of exp at default high-precision step") {
  const Bits p = 256;
  std::function<Real(const Real&)> e = [](const Real& x) { return exp(x); };
  auto d = finite_diff<Real, Real>(e, Real(1L, p), 1, default_fd_step<Real>(p));
  Real exact = exp(Real(1L, p));
  CHECK(abs(d.value - exact) / exact < 1e-45);
  CHECK(d.err < 1e-40);
  auto d5 = finite_diff<Real, Real>(e, Real(1L, p), 2, default_fd_step<Real>(p), Stencil::FivePoint);
  CHECK(abs(d5.value - exact) / exact < 1e-35);  // rounding ~ eps / h^2
}

TEST_CASE("certify doubles precision until runs agree") {
  int calls = 0;
  auto r = certify(
      [&calls](Bits p) {
        ++calls;
        return pi(p);
      },
      128, 30, 4096);
  CHECK(r.digits >= 30);
  CHECK(calls == 2);
  CHECK_THROWS_AS(certify([](Bits p) { return Real(static_cast<long>(p), p); }, 128, 10, 512), NumericError);
}
