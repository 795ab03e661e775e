#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/painleve1.hpp"

using namespace pertlag;

TEST_CASE("tritronquee coefficients") {
  const Bits p = 256;
  auto ts = tritronquee_series(6, p);
  Real r6 = sqrt(Real(6L, p));
  CHECK(abs(ts.a[1] - tritronquee_a1(p)) < 1e-70);
  CHECK(abs(ts.a[1] + r6 / 48L) < 1e-70);
  CHECK(abs(ts.a[2] + Real(49L, p) / 768L) < 1e-70);
  CHECK(abs(ts.a[3] + 1225 * r6 / 9216L) < 1e-70);
  CHECK(abs(ts.a[4] + Real(4412401L, p) / 1179648L) < 1e-65);
  CHECK_THROWS_AS(tritronquee_series(0, p), NumericError);
}

TEST_CASE("series evaluation and tail") {
  const Bits p = 256;
  auto full = tritronquee_series(200, p);
  const Real z(-40L, p);
  int K = optimal_order(full, z);
  CHECK(K == 89);
  auto ts = full.truncated(K);
  Real tail = ts.tail(z);
  CHECK(tail < 1e-79);
  CHECK(abs(ts.y(z) - Real("2.581975875028713070555973035026150261166", p)) < 1e-38);
  CHECK(abs(ts.dy(z) - Real("-0.03227551244118867414709195281598790715912", p)) < 1e-38);
  // leading term
  CHECK(abs(ts.y(z) - sqrt(-z / 6L)) < 0.01);
  CHECK(ts.y(z).str(5) == "2.5820e+00");
  CHECK(optimal_order(full, Real(-20L, p)) == 37);
  CHECK(optimal_order(full, Real(-30L, p)) == 62);
  CHECK_THROWS_AS(ts.eval(Real(-5L, p), Real(1e-30, p)), NumericError);
  CHECK_THROWS_AS(ts.y(Real(1L, p)), NumericError);
}

TEST_CASE("plug-back residual decays at the formal rate") {
  const Bits p = 256;
  const int K = 4;
  auto ts = tritronquee_series(K, p);
  double z[3] = {-20, -40, -80}, r[3];
  for (int i = 0; i < 3; ++i) r[i] = ts.plug_back_residual(Real(z[i], p)).to_double();
  const double expect = -2.5 * (K + 1);
  for (int i = 0; i < 2; ++i) {
    double slope = std::log(r[i + 1] / r[i]) / std::log(2.0);
    CHECK(std::abs(slope - expect) < 0.3);
  }
}

TEST_CASE("series and ODE agree at -20") {
  const Bits p = 256;
  auto sol = p1_solve(Real(-30L, p), Real(-20L, p), 200, p);
  CHECK(!sol.pole);
  CHECK(sol.K == 62);
  auto full = tritronquee_series(200, p);
  const Real z(-20L, p);
  auto ts = full.truncated(optimal_order(full, z));
  CHECK(abs(sol.y(z) - ts.y(z)) < ts.tail(z));
  CHECK(abs(sol.y(z) - Real("1.825689738510784253368245710851449533369", p)) < 1e-34);
}

TEST_CASE("trajectory from two starting points") {
  const Bits p = 256;
  auto s30 = p1_solve(Real(-30L, p), Real(-15L, p), 200, p);
  auto s40 = p1_solve(Real(-40L, p), Real(-15L, p), 200, p);
    // launch errors of size tail(-30) grow by about e^{70} on the way to -15
  CHECK(abs(s30.y(Real(-15L, p)) - Real("1.581046103857109295611607368605181680272", p)) < 1e-25);
  Real worst(0L, p);
  for (int i = 0; i <= 30; ++i) {
    Real s = Real(-30L, p) + Real(i, p) / 2L;
    worst = max(worst, abs(s30.y(s) - s40.y(s)));
  }
  CHECK(worst < 1e-12);
  CHECK(s40.hamiltonian_residual(41) < 1e-15);
  // y - sqrt(-s/6) shrinks toward -infinity
  Real prev(1L, p);
  for (int s : {-15, -20, -25, -30, -35, -40}) {
    Real d = abs(s40.y(Real(s, p)) - sqrt(Real(-s, p) / 6L));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("pole ahead is recorded") {
  const Bits p = 128;
  auto sol = p1_solve(Real(-20L, p), Real(4L, p), 60, p);
  CHECK(sol.pole);
  CHECK(sol.s_reached < sol.pole_location);
  CHECK_THROWS_AS(p1_solve(Real(-20L, p), Real(4L, p), 60, p, true), NumericError);
}

TEST_CASE("double-scaling variable") {
  const Bits p = 256;
  auto cc = critical_constants(p);
  for (int n : {16, 32, 64}) CHECK(s_star_of(n, cc.t_cr, cc).is_zero());
  Real t = t_of_s_star(32, Real("1.5", p), cc);
  CHECK(abs(s_star_of(32, t, cc) - Real("1.5", p)) < 1e-70);
  CHECK(abs(s_star_scale(cc) - s_star_of(1, cc.t_cr - 1, cc)) < 1e-70);
}

TEST_CASE("extraction inverts the models") {
  const Bits p = 256;
  auto cc = critical_constants(p);
  const int n = 40;
  const Real t = t_of_s_star(n, Real("-0.7", p), cc);
  const Real l("-1.5", p);
  const Complex y(Real("0.8", p), Real("0.1", p));
  const Complex H(Real("-0.3", p), Real("0.2", p));
  FiniteNInputs in;
  in.n = n;
  in.t = t;
  in.beta = beta_model(n, y, cc);
  in.a_nn = a_model(n, t, y, cc);
  in.dH_dt = dH_model(n, y, cc);
  in.gamma2 = gamma2_model(n, l, H, cc);
  auto rec = extract_suite(in, l, p);
  CHECK(abs(*rec.y_beta - y) < 1e-70);
  CHECK(abs(*rec.y_a - y) < 1e-70);
  CHECK(abs(*rec.y_dH - y) < 1e-70);
  CHECK(abs(*rec.H_gamma - H) < 1e-65);
  CHECK(abs(rec.s_star - Real("-0.7", p)) < 1e-70);

  // leading term alone gives zero, and the extraction is linear in the deviation
  Real b0 = (cc.b_cr - cc.a_cr) * (cc.b_cr - cc.a_cr) / 16L;
  CHECK(b0.str(4) == "2.027e+00");
  in.beta = Complex(b0);
  CHECK(abs(*extract_suite(in, l, p).y_beta) < 1e-70);
  in.beta = Complex(b0 - Real("0.01", p));
  Complex y1 = *extract_suite(in, l, p).y_beta;
  in.beta = Complex(b0 - Real("0.02", p));
  CHECK(abs(*extract_suite(in, l, p).y_beta - 2 * y1) < 1e-70);
  CHECK(abs(cc.t_cr / sqrt(cc.a_cr * cc.b_cr) + cc.a_cr) < 1e-70);
}

TEST_CASE("consistency check on data built from a true solution") {
  const Bits p = 256;
  auto cc = critical_constants(p);
  auto sol = p1_solve(Real(-30L, p), Real("2.2", p), 200, p);
  REQUIRE(!sol.pole);
  const Real l("-1.5", p);
  std::vector<std::vector<ExtractionRecord>> levels;
  for (int n : {16, 32}) {
    std::vector<ExtractionRecord> recs;
    for (int i = 0; i <= 8; ++i) {
      Real s = Real(-2L, p) + Real(i, p) / 2L;
      Real t = t_of_s_star(n, s, cc);
      Complex y(sol.y(s)), H(sol.hamiltonian(s));
      FiniteNInputs in;
      in.n = n;
      in.t = t;
      in.beta = beta_model(n, y, cc);
      in.a_nn = a_model(n, t, y, cc);
      in.dH_dt = dH_model(n, y, cc);
      in.gamma2 = gamma2_model(n, l, H, cc);
      recs.push_back(extract_suite(in, l, p));
    }
    levels.push_back(recs);
  }
  auto rep = pi_consistency_check(levels, 1.5, p);
  REQUIRE(rep.levels.size() == 2);
  for (const auto& lv : rep.levels) {
    CHECK(lv.flagged == 1);  // y(2) is already past the cap
    CHECK(lv.max_spread < 1e-60);
    CHECK(lv.max_p1_residual < 0.5);
    CHECK(lv.max_hamiltonian_residual < 0.5);
    CHECK(lv.points[4].p1_residual.has_value());
    CHECK(!lv.points[7].p1_residual.has_value());
  }
  CHECK(rep.spread_improved.size() == 9);
}
