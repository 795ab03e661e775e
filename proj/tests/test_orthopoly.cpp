#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/orthopoly.hpp"

using namespace pertlag;

namespace {

WeightParams params(int n, const char* t, const char* are, const char* aim, Bits p) {
  return {n, Real(t, p), Complex(Real(are, p), Real(aim, p)), Real("0.0381", p)};
}

Complex cx(const char* re, const char* im, Bits p) { return Complex(Real(re, p), Real(im, p)); }

}  // namespace

TEST_CASE("small Hankel determinants") {
  const Bits p = 256;
  auto m = moment_table(params(2, "-0.03", "0.4", "0.3", p), 4, p);
  CHECK(abs(exp(hankel_logdet(1, m).log_det) - m.mu(0)) < 1e-65);
  Complex d2 = m.mu(0) * m.mu(2) - m.mu(1) * m.mu(1);
  CHECK(abs(exp(hankel_logdet(2, m).log_det) - d2) / abs(d2) < 1e-65);
  CHECK(abs(hankel_logdet(0, m).log_det) == 0);
  CHECK_THROWS_AS(hankel_logdet(4, m), NumericError);  // needs mu_6
}

TEST_CASE("3x3 determinant against Bessel-form moments") {
  const Bits p = 256;
  auto m = moment_table(params(1, "1", "0.5", "0", p), 4, p);
  auto d = hankel_logdet(3, m);
  CHECK(abs(d.log_det.real() - Real("1.3282006762192411583611542235189062391041537834762069389763", p)) < 1e-55);
  CHECK(abs(d.log_det.imag()) < 1e-60);
  auto c = hankel_logdet_certified(3, params(1, "1", "0.5", "0", p), 128, 30, 1024);
  CHECK(c.certified_digits >= 30);
  CHECK(abs(c.log_det.real() - Real("1.3282006762192411583611542235189062391041537834762069389763", p)) < 1e-30);
}

TEST_CASE("rank-deficient moments are reported as SINGULAR") {
  const Bits p = 128;
  MomentTable m;
  m.params = params(1, "1", "0.5", "0", p);
  m.prec = p;
  m.inverse = {-1, Complex(Real(1L, p)), Real(0L, p)};
  for (int j = 0; j <= 5; ++j) m.entries.push_back({j, Complex(Real(1L, p)), Real(0L, p)});
  CHECK(abs(exp(hankel_logdet(1, m).log_det) - Complex(Real(1L, p))) < 1e-35);
  try {
    hankel_logdet(2, m);
    FAIL("expected SINGULAR");
  } catch (const NumericError& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
}

TEST_CASE("recurrence table basics") {
  const Bits p = 256;
  auto wp = params(3, "-0.04", "0.3", "0.2", p);
  auto m = moment_table(wp, moments_needed(4), p);
  auto r = recurrence_table(4, m);
  CHECK(abs(r.rows[0].gamma2 - Complex(Real(1L, p)) / m.mu(0)) < 1e-60);
  CHECK(abs(r.rows[0].alpha - m.mu(1) / m.mu(0)) < 1e-60);
  for (int k = 1; k <= 4; ++k)
    CHECK(abs(r.rows[k].beta * r.rows[k].gamma2 / r.rows[k - 1].gamma2 - Complex(Real(1L, p))) < 1e-55);
  CHECK(r.orthogonality_residual < 1e-55);
  CHECK(r.recurrence_residual < 1e-55);

  // independent values from an external determinant computation
  CHECK(abs(r.rows[1].beta - cx("0.445760713960565378381711460847864269885828987217177782033521",
                                 "0.000139233701269385318630097543866338506380057658292342878727906", p)) < 1e-45);
  CHECK(abs(r.rows[2].beta - cx("1.11472196074560786312170794099472646668381590820979740512145",
                                 "0.000594985235271667913901850100382334249554438045516474999970486", p)) < 1e-45);
  CHECK(abs(r.rows[0].a - cx("-0.043180830406555847566741285036869371806490803750854456963174",
                              "-0.000152394766394434898017247817604076489477563665986489650499518", p)) < 1e-45);
  CHECK(abs(r.rows[1].a - cx("-0.0454688866295670421655495634086613169734877175356303147459107",
                              "-0.000530430996707317839375188356498105087074358622473445048592267", p)) < 1e-45);
  CHECK(abs(r.rows[2].a - cx("-0.0478662775607696613413370340518783567152517766064772946541947",
                              "-0.00114160257573945303312488867599360860255758272825502816029102", p)) < 1e-45);
}

TEST_CASE("boundary values of the RH solution") {
  const Bits p = 256;
  for (const char* ts : {"0.2", "-0.04"}) {
    auto wp = params(3, ts, "0.3", "0.2", p);
    auto m = moment_table(wp, moments_needed(3), p);
    auto r = recurrence_table(3, m);
    for (int k = 1; k <= 3; ++k) {
      auto y = y_boundary(k, r, m);
      CHECK(abs(y.y11 - r.monic[k][0]) == 0);
      CHECK(abs(y.det - Complex(Real(1L, p))) < 1e-55);
      Complex g2 = -Complex(Real(1L, p)) / (Complex(Real(0L, p), 2 * pi(p)) * y.ym1_12);
      CHECK(abs(g2 - r.rows[k].gamma2) / abs(g2) < 1e-55);
      CHECK(abs(y.ym1_12 * y.ym1_21 - r.rows[k].beta) / abs(r.rows[k].beta) < 1e-55);
    }
  }
}

TEST_CASE("a_0 equals t gamma_0^2 times the inverse moment") {
  const Bits p = 256;
  auto wp = params(2, "0.1", "0.5", "0", p);
  auto m = moment_table(wp, moments_needed(1), p);
  auto r = recurrence_table(1, m);
  Complex rhs = r.rows[0].gamma2 * m.mu(-1) * wp.t;
  CHECK(abs(r.rows[0].a - rhs) < 1e-60);
}

TEST_CASE("identity suite") {
  const Bits p = 384;
  struct Case {
    int k, n;
    const char* t;
    const char* are;
    const char* aim;
  };
  for (auto c : {Case{1, 2, "0.1", "0.5", "0"}, Case{2, 3, "-0.04", "0.5", "0"}, Case{2, 3, "-0.04", "0.3", "0.2"}}) {
    CAPTURE(c.k);
    CAPTURE(c.t);
    auto rep = identity_suite(c.k, params(c.n, c.t, c.are, c.aim, p), p);
    CHECK(rep.res_a_y < 1e-40);
    CHECK(rep.res_dh_y < 1e-40);
    CHECK(rep.res_beta_h < 1e-40);
    CHECK(rep.res_h_sum < 1e-40);
    CHECK(rep.res_first_integral < 1e-40);
    CHECK(rep.res_analytic < 1e-40);
  }
  CHECK_THROWS_AS(identity_suite(1, params(2, "0", "0.5", "0", p), p), NumericError);
}

TEST_CASE("moment generating function") {
  const Bits p = 256;
  CHECK(abs(mgf(params(2, "0", "0.5", "0", p), p) - Complex(Real(1L, p))) < 1e-60);
  Complex m5 = mgf(params(2, "0.5", "0.5", "0", p), p);
  CHECK(abs(m5.real() - Real("0.211435715079008843679187235011763477734327894187834092109258", p)) < 1e-50);
  CHECK(m5.real() > 0);
  CHECK(m5.real() < 1);
  Real prev(2L, p);
  for (const char* ts : {"0.1", "0.2", "0.4"}) {
    Real v = mgf(params(2, ts, "0.5", "0", p), p).real();
    CHECK(v < prev);
    prev = v;
  }
  CHECK(abs(prev - Real("0.277196953007955396813397854462511190614158196634360406012983", p)) < 1e-50);
}

TEST_CASE("log D_k is continued without jumps along t") {
  const Bits p = 192;
  auto wp = params(4, "0.1", "0.2", "0.6", p);
  std::vector<Real> ts;
  for (int i = 0; i <= 8; ++i) ts.push_back(Real(0.1, p) - Real(0.02, p) * static_cast<long>(i));
  auto path = logdet_along(4, wp, ts, p);
  CHECK(abs(path[0].imag()) < 1e-40);
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(abs(path[i] - path[i - 1]) < 1);
}
