#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pertlag/equilibrium.hpp"
#include "pertlag/numkernel/error.hpp"

using namespace pertlag;

namespace {

Complex cx(const char* re, const char* im, Bits p) { return Complex(Real(re, p), Real(im, p)); }

Real near_critical(Bits p) { return critical_constants(p).t_cr + Real("0.002", p); }

}  // namespace

TEST_CASE("critical constants") {
  const Bits p = 256;
  auto cc = critical_constants(p);
  CHECK(abs(cc.t_cr - Real("-0.0506692141338398589129633185368886694382427988726277872332517", p)) < 1e-55);
  CHECK(abs(cc.a_cr - Real("0.0763389490684636802405418767247316945191276036993195050548696", p)) < 1e-55);
  CHECK(abs(cc.b_cr - Real("5.77098315279460895927837436982580491644261718890204148483539", p)) < 1e-55);
  CHECK(cc.t_cr.str(2) == "-5.1e-02");
  CHECK(cc.a_cr.str(2) == "7.6e-02");
  CHECK(cc.b_cr.str(4) == "5.771e+00");
}

TEST_CASE("endpoints of the positive measure") {
  const Bits p = 256;
  auto e = solve_endpoints(Real(0L, p), p);
  Real s8 = sqrt(Real(8L, p));
  CHECK(abs(e.a - (3 - s8)) < 1e-70);
  CHECK(abs(e.b - (3 + s8)) < 1e-70);
  CHECK(e.residual < 1e-30);
  CHECK(e.positive);

  auto e3 = solve_endpoints(Real("0.3", p), p);
  CHECK(abs(e3.a - Real("0.348948719634683742612467631153166016731099750343563415966895", p)) < 1e-55);
  CHECK(abs(e3.b - Real("6.06353563326308234620810105815217801384912154427734059883051", p)) < 1e-55);

  auto cc = critical_constants(p);
  auto e39 = solve_endpoints(cc.t_cr * 39L / 40L, p);
  CHECK(abs(e39.a - Real("0.0904792565873542080697928743433696675681859286156635419338614", p)) < 1e-50);
  CHECK(abs(e39.b - Real("5.77280745427995517473733597606218751788392463502559752415101", p)) < 1e-50);

  // The branch ends in a fold at t_cr: only square-root accuracy there.
  auto ec = solve_endpoints(cc.t_cr, p);
  CHECK(abs(ec.a - cc.a_cr) < 1e-30);
  CHECK(abs(ec.b - cc.b_cr) < 1e-30);
  CHECK(abs(ec.c + cc.a_cr) < 1e-30);
  CHECK(ec.positive);
  CHECK_THROWS_AS(solve_endpoints(cc.t_cr - Real("0.001", p), p), NumericError);
}

TEST_CASE("signed measure") {
  const Bits p = 256;
  auto cc = critical_constants(p);
  auto s = solve_signed(cc.t_cr, p);
  CHECK(abs(s.b - cc.b_cr) < 1e-60);
  CHECK(abs(s.d0 - cc.a_cr * cc.a_cr) < 1e-60);
  CHECK(abs(s.d1 + 2 * cc.a_cr) < 1e-60);

  auto s2 = solve_signed(near_critical(p), p);
  CHECK(abs(s2.b - Real("5.77403595619883145456895826082329233774844485434938607026219", p)) < 1e-55);
  CHECK(abs(s2.d0 - Real("0.00559612852331094688262322670410936151674030497788710153831325", p)) < 1e-55);
  CHECK(abs(s2.d1 - Real("-0.151151496434816112835791807950719678385341374674966717396342", p)) < 1e-55);

  Real h("1e-20", p);
  Real db = (solve_signed(cc.t_cr + h, p).b - solve_signed(cc.t_cr - h, p).b) / (2 * h);
  CHECK(abs(db - sqrt(cc.b_cr / cc.a_cr) / (cc.b_cr - cc.a_cr)) < 1e-30);
}

TEST_CASE("densities") {
  const Bits p = 192;
  auto cc = critical_constants(p);
  Real ts = near_critical(p);
  CHECK(abs(density_mass(Real("0.3", p), DensityMode::Regular, p) - 1) < 1e-20);
  CHECK(abs(density_mass(Real(0L, p), DensityMode::Regular, p) - 1) < 1e-20);
  CHECK(abs(density_mass(ts, DensityMode::Signed, p) - 1) < 1e-20);
  CHECK(abs(density_mass(cc.t_cr, DensityMode::Critical, p) - 1) < 1e-20);

  auto e = solve_endpoints(Real("0.3", p), p);
  CHECK(regular_density(e, e.a).is_zero());
  CHECK(regular_density(e, e.b).is_zero());
  CHECK_THROWS_AS(density(Real("0.01", p), Real("0.3", p), DensityMode::Regular, p), NumericError);

  auto sc = solve_signed(cc.t_cr, p);
  for (const char* x : {"0.1", "0.5", "2", "5"})
    CHECK(abs(signed_density(sc, cc, Real(x, p)) - critical_density(cc, Real(x, p))) < 1e-50);

  auto eh = solve_endpoints(cc.t_cr / 2L, p);
  for (int i = 0; i <= 40; ++i) {
    Real x = eh.a + (eh.b - eh.a) * static_cast<long>(i) / 40L;
    CHECK(regular_density(eh, x) >= 0);
  }
}

TEST_CASE("g function and Lagrange multiplier") {
  const Bits p = 192;
  auto gl = g_and_l(near_critical(p), p);
  CHECK(abs(gl.l - Real("-1.55959059544182089439308922944022", p)) < 1e-30);
  CHECK(gl.spread < 1e-40);
  const Real b = gl.g.data().b;
  CHECK(gl.g.euler_lagrange(b + 1, gl.l) < 0);

  Complex big(Real("1e6", p));
  CHECK(abs(gl.g(big) - log(big)) < 1e-5);

  Complex z = cx("3", "0.5", p);
  Complex h(Real("1e-20", p));
  Complex fd = (gl.g(z + h) - gl.g(z - h)) / (2 * h);
  CHECK(abs(fd - gl.g.derivative(z)) < 1e-30);
}

TEST_CASE("phi functions") {
  const Bits p = 192;
  PhiMaps pm(near_critical(p), p);
  Complex z = cx("0.05", "0.03", p);
  CHECK(abs(pm.phi_t(z) - cx("0.0446235553789952777471932110785321610841983833803986480613641",
                             "-0.0000943499748274602477817724321953168327991728544693179856011423", p)) < 1e-45);
  CHECK(abs(pm.phi_cr(z) - cx("0.0376246187678677999278928876829184319085668946715095360537066",
                              "0.0100788699544806642395014149423280908204574114144190544819138", p)) < 1e-45);
  Complex z2 = cx("1.5", "-0.7", p);
  CHECK(abs(pm.phi_t(z2) - cx("-0.534965657523579659265946163819787727848034327978914344262993",
                              "-1.56315204954550729109876410695342191143902911987049874457235", p)) < 1e-45);
  CHECK(abs(pm.phi_cr(z2) - cx("-0.534285161687056506320117843623558036631205004964385345519035",
                               "-1.56543797184967704118900484881096014425059292376560081843511", p)) < 1e-45);

  auto cc = pm.constants();
  CHECK(abs(pm.phi_cr(Complex(cc.a_cr))) == 0);
  // Local law at a_cr along three rays. The next term is (5/7) c (z - a_cr)
  // with c the log-derivative of (s - b_cr)^{1/2} / s^2 at a_cr.
  Real c = Real(1L, p) / (2 * (cc.a_cr - cc.b_cr)) - 2 / cc.a_cr;
  for (const char* rs : {"1e-4", "1e-6"}) {
    for (const char* ang : {"0.5", "1.5", "-2"}) {
      Complex dz = Real(rs, p) * Complex(cos(Real(ang, p)), sin(Real(ang, p)));
      CAPTURE(ang);
      Complex r = pm.phi_cr_local_ratio(cc.a_cr + dz);
      CHECK(abs(r - 1) < 2e-3 * Real(rs, p) / Real("1e-4", p));
      CHECK(abs((r - 1) / dz - c * 5L / 7L) / abs(c) < 50 * Real(rs, p));
    }
  }
  // phi_0 local form, up to O(t - t_cr) and O(z - a_cr)
  PhiMaps close(cc.t_cr + Real("1e-8", p), p);
  CHECK(abs(close.phi_0_local_ratio(cc.a_cr + Complex(Real(0L, p), Real("1e-6", p))) - 1) < 1e-3);
  CHECK_THROWS_AS(PhiMaps(cc.t_cr, p).phi_0(z), NumericError);

  // phi_t - t / (2z) + log(z) / 2 settles as z -> 0
  Complex prev;
  for (int k = 2; k <= 5; ++k) {
    Complex zz = Complex(Real(1L, p), Real(1L, p)) * pow(Real(10L, p), static_cast<long>(-k));
    Complex v = pm.phi_t(zz) - pm.t() / (2 * zz) + log(zz) / 2L;
    CHECK(abs(v) < 10);
    if (k > 2) CHECK(abs(v - prev) < 0.05);
    prev = v;
  }
  CHECK_THROWS_AS(pm.phi_t(Complex(Real(-1L, p))), NumericError);
}

TEST_CASE("conformal map, q and the scaling variable") {
  const Bits p = 192;
  PhiMaps pm(near_critical(p), p);
  auto cc = pm.constants();
  Complex zq = cc.a_cr + cx("0.003", "0.002", p);
  CHECK(abs(pm.f(zq) - cx("-0.0188642693133809279620373162588501809204460612006398893074418",
                          "-0.0121847069233707837325392999756371034693933588519396892308182", p)) < 1e-45);
  CHECK(abs(pm.q(zq) - cx("-0.0181440226890485478062835497850376353967798995359860715735834",
                          "0.000328919007756918177867323677622347301838294322587757747081922", p)) < 1e-45);
  // f is real with negative slope through a_cr
  Real h("1e-10", p);
  Complex fl = pm.f(Complex(cc.a_cr - h));
  CHECK(abs(fl.imag()) < 1e-50);
  Real slope = (fl.real() / h) * -1L;
  Real expect = -pow(cc.b_cr - cc.a_cr, Real(1L, p) / 5L) * pow(2 * cc.a_cr, Real(-4L, p) / 5L);
  CHECK(abs(slope / expect - 1) < 1e-6);
  // first-order coefficient of f / (-C (z - a_cr)) is (2/7) c
  Real c = Real(1L, p) / (2 * (cc.a_cr - cc.b_cr)) - 2 / cc.a_cr;
  Complex dz = Complex(Real(0L, p), Real("1e-7", p));
  Complex fr = (pm.f(cc.a_cr + dz) / (expect * dz) - 1) / dz;
  CHECK(abs(fr - c * 2L / 7L) / abs(c) < 1e-4);

  // q is continuous at a_cr
  CHECK(abs(pm.q(cc.a_cr + Complex(Real(0L, p), Real("1e-12", p))) - pm.q(Complex(cc.a_cr))) < 1e-9);
  // leading coefficient as t -> t_cr
  auto lead = [&](const Real& dt) {
    return -pow(2 * cc.a_cr, Real(-3L, p) / 5L) / sqrt(cc.a_cr * cc.b_cr) *
           pow(cc.b_cr - cc.a_cr, Real(2L, p) / 5L) * dt;
  };
  Real dt("1e-6", p);
  CHECK(abs(PhiMaps(cc.t_cr + dt, p).q_at_a() / lead(dt) - 1) < 1e-4);
  CHECK(abs(PhiMaps(cc.t_cr, p).s_star(64)) < 1e-50);
  CHECK(pm.s_star(64) < 0);

  for (const char* ang : {"0.7", "2.5", "-1.2"}) {
    Complex z = cc.a_cr + Real("0.005", p) * Complex(cos(Real(ang, p)), sin(Real(ang, p)));
    CHECK(pm.theta_relation_residual(z, 64) < 1e-40);
  }
}

TEST_CASE("sign regions") {
  const Bits p = 128;
  SignGridSpec grid;
  grid.nx = 8;
  grid.ny = 4;
  auto cc = critical_constants(p);
  auto rep = sign_region_check(cc.t_cr, grid, p);
  CHECK(rep.ok());
  CHECK(rep.checks > 50);
  CHECK(rep.cells.size() == 32);
  CHECK(rep.theta_residual < 1e-10);
  CHECK(rep.csv().rfind("x,y,sign\n", 0) == 0);
  auto rep2 = sign_region_check(cc.t_cr + Real("0.002", p), grid, p);
  CHECK(rep2.ok());
}
