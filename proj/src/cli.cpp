#include "pertlag/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "pertlag/equilibrium.hpp"
#include "pertlag/numkernel/error.hpp"
#include "pertlag/orthopoly.hpp"
#include "pertlag/painleve1.hpp"
#include "pertlag/painleve3.hpp"

namespace pertlag::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsing finished without a command to run (help, or a message already printed).
struct Exit {
  int code;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  json payload = json::object();
  json certificates = json::object();
  std::vector<std::string> warnings;  // machine-readable codes
  Table table;
};

std::string S(const Real& x) { return x.str(); }
json C(const Complex& z) { return json{{"re", S(z.real())}, {"im", S(z.imag())}}; }

// ---- option declarations --------------------------------------------------

struct OptionSpec {
  std::string name, def, help;
};

const std::vector<OptionSpec> kCommon = {
    {"prec", "256", "working precision in bits (>= 128)"},
    {"out", "", "output file, stdout when empty"},
    {"format", "json", "json or csv"},
    {"timing", "false", "add wall-clock timing to the envelope"},
};

const std::vector<OptionSpec> kWeight = {
    {"n", "4", "weight parameter n"},
    {"t", "0.5", "weight parameter t"},
    {"alpha", "0.5", "contour constant alpha, re or re,im"},
    {"delta", "0.0381", "circle radius delta of the contour"},
};

struct CommandSpec {
  std::string name, help;
  bool weight;
  std::vector<OptionSpec> options;
};

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> list = {
      {"moments", "contour moments mu_j, j = -1..jmax", true, {{"jmax", "8", "largest moment index"}}},
      {"hankel",
       "log of the Hankel determinant D_k, precision-certified",
       true,
       {{"k", "", "size, defaults to n"}, {"digits", "20", "required agreement digits"}}},
      {"recurrence", "recurrence coefficients up to K", true, {{"K", "", "largest index, defaults to n"}}},
      {"identities", "differential identity residuals at (k, n, t)", true, {{"k", "1", "polynomial index"}}},
      {"p3-verify",
       "Hankel-derived a_{k,n}(t) against the Painleve III solution",
       true,
       {{"k", "1", "polynomial index"},
        {"grid", "0.05:0.5:4", "t grid lo:hi:count"},
        {"anchor", "", "fit point, defaults to the first grid point / 5"}}},
      {"equilibrium",
       "endpoints, signed measure and critical constants",
       false,
       {{"t", "0", "potential parameter"}, {"with-l", "false", "also compute g and the constant l"}}},
      {"phi-map",
       "phi-functions, local coordinates and the sign-region check",
       false,
       {{"t", "-0.0486692", "potential parameter near the critical value"},
        {"z", "0.05,0.03;1.5,-0.7", "points re,im separated by ;"},
        {"n", "64", "n for s* and the theta relation"},
        {"sign-grid", "", "nx,ny to run the sign-region check"}}},
      {"p1-solve",
       "tritronquee launch and Painleve I integration",
       false,
       {{"s-start", "-30", "launch point"},
        {"s-end", "0", "end point"},
        {"kmax", "200", "largest series order considered"},
        {"samples", "61", "number of output samples"}}},
      {"ds-extract",
       "double-scaling extraction at one (n, t)",
       false,
       {{"n", "16", "matrix size"},
        {"t", "", "weight parameter t; overrides sstar"},
        {"sstar", "0", "double-scaling variable"},
        {"alpha", "0.5", "contour constant"},
        {"dh", "true", "also extract from dH/dt"}}},
      {"consistency",
       "Painleve I consistency of extracted data over n and s*",
       false,
       {{"n-list", "16,32,64", "comma separated n"},
        {"sstar-grid", "-2:2:9", "lo:hi:count"},
        {"alpha", "0.5", "contour constant"},
        {"pole-cap", "10", "|y| above this flags POLE_SUSPECT"},
        {"jobs", "1", "worker threads for the finite-n data"}}},
      {"report-all",
       "runs the pipeline and writes one envelope per command",
       false,
       {{"out-dir", "report", "directory for the envelopes"},
        {"n-list", "16,32", "comma separated n"},
        {"sstar-grid", "-2:2:9", "lo:hi:count"},
        {"alpha", "0.5", "contour constant"}}},
  };
  return list;
}

// ---- typed access ---------------------------------------------------------

class Opts {
 public:
  explicit Opts(const RunConfig& c) : c_(c) {}

  const std::string& str(const std::string& k) const { return c_.options.at(k); }
  bool flag(const std::string& k) const {
    const auto& v = str(k);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError("--" + k + " expects true or false");
  }
  long integer(const std::string& k) const {
    try {
      std::size_t pos = 0;
      long v = std::stol(str(k), &pos);
      if (pos != str(k).size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw UsageError("--" + k + " expects an integer");
    }
  }
  Real real(const std::string& k, Bits prec) const { return parse_real(str(k), k, prec); }
  Complex complex(const std::string& k, Bits prec) const { return parse_complex(str(k), k, prec); }
  std::vector<Real> grid(const std::string& k, Bits prec) const {
    auto parts = split(str(k), ':');
    if (parts.size() != 3) throw UsageError("--" + k + " expects lo:hi:count");
    Real lo = parse_real(parts[0], k, prec), hi = parse_real(parts[1], k, prec);
    long count = 0;
    try {
      count = std::stol(parts[2]);
    } catch (const std::exception&) {
    }
    if (count < 1) throw UsageError("--" + k + " needs a positive count");
    std::vector<Real> out;
    for (long i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::vector<int> int_list(const std::string& k) const {
    std::vector<int> out;
    for (const auto& p : split(str(k), ',')) {
      try {
        out.push_back(std::stoi(p));
      } catch (const std::exception&) {
        throw UsageError("--" + k + " expects comma separated integers");
      }
    }
    if (out.empty()) throw UsageError("--" + k + " is empty");
    return out;
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
      if (!cur.empty()) out.push_back(cur);
    return out;
  }
  static Real parse_real(const std::string& s, const std::string& k, Bits prec) {
    try {
      return Real(s, prec);
    } catch (const std::exception&) {
      throw UsageError("--" + k + " expects a number, got '" + s + "'");
    }
  }
  static Complex parse_complex(const std::string& s, const std::string& k, Bits prec) {
    auto parts = split(s, ',');
    if (parts.size() == 1) return Complex(parse_real(parts[0], k, prec), Real(0L, prec));
    if (parts.size() == 2) return Complex(parse_real(parts[0], k, prec), parse_real(parts[1], k, prec));
    throw UsageError("--" + k + " expects re or re,im");
  }

 private:
  const RunConfig& c_;
};

Bits precision(const Opts& o) {
  long p = o.integer("prec");
  if (p < 128) throw UsageError("--prec must be at least 128");
  return static_cast<Bits>(p);
}

WeightParams weight(const Opts& o, Bits prec) {
  long n = o.integer("n");
  if (n < 1) throw UsageError("--n must be positive");
  WeightParams p{static_cast<int>(n), o.real("t", prec), o.complex("alpha", prec), o.real("delta", prec)};
  p.validate();
  return p;
}

// ---- moment cache ---------------------------------------------------------

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string moment_key(const WeightParams& p, int jmax, Bits prec) {
  return "n=" + std::to_string(p.n) + ";t=" + S(p.t) + ";alpha=" + S(p.alpha.real()) + "," + S(p.alpha.imag()) +
         ";delta=" + S(p.delta) + ";jmax=" + std::to_string(jmax) + ";prec=" + std::to_string(prec);
}

json entry_json(const MomentEntry& e) { return json{e.j, S(e.value.real()), S(e.value.imag()), S(e.err)}; }

MomentEntry entry_from(const json& j, Bits prec) {
  return MomentEntry{j[0].get<int>(), Complex(Real(j[1].get<std::string>(), prec), Real(j[2].get<std::string>(), prec)),
                     Real(j[3].get<std::string>(), prec)};
}

// Moment tables keyed by (params, precision), stored as decimal strings with
// round-trip digits so a reload is bit-identical.
MomentSource cached_moments(const std::string& dir) {
  return [dir](const WeightParams& p, int jmax, Bits prec) {
    const std::string key = moment_key(p, jmax, prec);
    char name[40];
    std::snprintf(name, sizeof name, "moments-%016llx.json", static_cast<unsigned long long>(fnv1a(key)));
    const fs::path path = fs::path(dir) / name;
    if (fs::exists(path)) {
      std::ifstream in(path);
      json j = json::parse(in, nullptr, false);
      if (!j.is_discarded() && j.value("key", "") == key) {
        MomentTable m;
        m.params = p;
        m.prec = prec;
        for (const auto& e : j["entries"]) m.entries.push_back(entry_from(e, prec));
        m.inverse = entry_from(j["inverse"], prec);
        m.evaluations = j["evaluations"].get<long>();
        return m;
      }
    }
    MomentTable m = moment_table(p, jmax, prec);
    json j{{"key", key}, {"entries", json::array()}, {"inverse", entry_json(m.inverse)}, {"evaluations", m.evaluations}};
    for (const auto& e : m.entries) j["entries"].push_back(entry_json(e));
    fs::create_directories(dir);
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << j.dump() << "\n";
    }
    fs::rename(tmp, path);
    return m;
  };
}

MomentSource moment_source() {
  const char* dir = std::getenv("HP_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return cached_moments(dir);
}

// ---- commands -------------------------------------------------------------

Result cmd_moments(const Opts& o) {
  const Bits prec = precision(o);
  auto p = weight(o, prec);
  long jmax = o.integer("jmax");
  if (jmax < 0) throw UsageError("--jmax must be nonnegative");
  auto src = moment_source();
  auto m = src ? src(p, static_cast<int>(jmax), prec) : moment_table(p, static_cast<int>(jmax), prec);
  Result r;
  r.table.header = {"j", "mu_re", "mu_im", "abs_err"};
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"j", e.j}, {"value", C(e.value)}, {"err", S(e.err)}});
    r.table.rows.push_back({std::to_string(e.j), S(e.value.real()), S(e.value.imag()), S(e.err)});
  }
  r.payload["entries"] = entries;
  r.payload["inverse"] = {{"j", -1}, {"value", C(m.inverse.value)}, {"err", S(m.inverse.err)}};
  r.certificates["max_abs_err"] = S(std::max_element(m.entries.begin(), m.entries.end(), [](auto& a, auto& b) {
                                      return a.err < b.err;
                                    })->err);
  r.certificates["integrand_evaluations"] = m.evaluations;
  return r;
}

Result cmd_hankel(const Opts& o) {
  const Bits prec = precision(o);
  auto p = weight(o, prec);
  int k = o.str("k").empty() ? p.n : static_cast<int>(o.integer("k"));
  long digits = o.integer("digits");
  if (k < 1 || digits < 1) throw UsageError("--k and --digits must be positive");
  auto h = hankel_logdet_certified(k, p, prec, static_cast<int>(digits), 16 * prec);
  Result r;
  r.payload["k"] = k;
  r.payload["log_det"] = C(h.log_det);
  r.payload["det"] = C(exp(h.log_det));
  r.certificates["certified_digits"] = h.certified_digits;
  r.certificates["agreeing_prec"] = h.prec;
  r.table.header = {"k", "log_det_re", "log_det_im", "certified_digits"};
  r.table.rows.push_back({std::to_string(k), S(h.log_det.real()), S(h.log_det.imag()), std::to_string(h.certified_digits)});
  return r;
}

Result cmd_recurrence(const Opts& o) {
  const Bits prec = precision(o);
  auto p = weight(o, prec);
  int K = o.str("K").empty() ? p.n : static_cast<int>(o.integer("K"));
  if (K < 0) throw UsageError("--K must be nonnegative");
  auto src = moment_source();
  auto m = src ? src(p, moments_needed(K), prec) : moment_table(p, moments_needed(K), prec);
  auto rt = recurrence_table(K, m);
  Result r;
  r.table.header = {"k", "gamma2_re", "gamma2_im", "alpha_re", "alpha_im", "beta_re", "beta_im", "a_re", "a_im"};
  json rows = json::array();
  for (const auto& row : rt.rows) {
    rows.push_back({{"k", row.k}, {"gamma2", C(row.gamma2)}, {"alpha", C(row.alpha)}, {"beta", C(row.beta)}, {"a", C(row.a)}});
    r.table.rows.push_back({std::to_string(row.k), S(row.gamma2.real()), S(row.gamma2.imag()), S(row.alpha.real()),
                            S(row.alpha.imag()), S(row.beta.real()), S(row.beta.imag()), S(row.a.real()),
                            S(row.a.imag())});
  }
  r.payload["rows"] = rows;
  r.certificates["orthogonality_residual"] = S(rt.orthogonality_residual);
  r.certificates["recurrence_residual"] = S(rt.recurrence_residual);
  return r;
}

Result cmd_identities(const Opts& o) {
  const Bits prec = precision(o);
  auto p = weight(o, prec);
  long k = o.integer("k");
  if (k < 1) throw UsageError("--k must be positive");
  auto rep = identity_suite(static_cast<int>(k), p, prec);
  Result r;
  r.payload["k"] = k;
  r.payload["a"] = C(rep.a);
  r.payload["beta"] = C(rep.beta);
  r.payload["H"] = C(rep.fd.H);
  r.payload["dH_dt"] = C(rep.fd.dH_dt);
  json res{{"a_vs_Y", S(rep.res_a_y)},
           {"dH_vs_Y", S(rep.res_dh_y)},
           {"beta_vs_H", S(rep.res_beta_h)},
           {"H_vs_sum_a", S(rep.res_h_sum)},
           {"first_integral", S(rep.res_first_integral)},
           {"dH_difference_vs_analytic", S(rep.res_analytic)}};
  r.payload["residuals"] = res;
  r.certificates["err_H"] = S(rep.fd.err_H);
  r.certificates["err_dH_dt"] = S(rep.fd.err_dH);
  r.certificates["max_residual"] = S(rep.max_residual());
  r.table.header = {"identity", "residual"};
  for (const auto& [key, v] : res.items()) r.table.rows.push_back({key, v.get<std::string>()});
  return r;
}

Result cmd_p3_verify(const Opts& o) {
  const Bits prec = precision(o);
  auto p = weight(o, prec);
  long k = o.integer("k");
  if (k < 1) throw UsageError("--k must be positive");
  auto grid = o.grid("grid", prec);
  Real anchor = o.str("anchor").empty() ? Real(grid.front() / 5L) : o.real("anchor", prec);
  auto rep = p3_verify(static_cast<int>(k), p, grid, anchor, prec);
  Result r;
  r.payload["k"] = rep.k;
  r.payload["anchor"] = S(rep.anchor);
  r.payload["resonant"] = C(rep.resonant);
  json pts = json::array();
  r.table.header = {"t", "a_hankel_re", "a_hankel_im", "a_ode_re", "a_ode_im", "deviation", "hankel_ode_residual"};
  for (const auto& pt : rep.points) {
    pts.push_back({{"t", S(pt.t)},
                   {"a_hankel", C(pt.a_hankel)},
                   {"a_ode", C(pt.a_ode)},
                   {"deviation", S(pt.deviation)},
                   {"hankel_residual", S(pt.hankel_residual)}});
    r.table.rows.push_back({S(pt.t), S(pt.a_hankel.real()), S(pt.a_hankel.imag()), S(pt.a_ode.real()),
                            S(pt.a_ode.imag()), S(pt.deviation), S(pt.hankel_residual)});
  }
  r.payload["points"] = pts;
  r.payload["max_deviation"] = S(rep.max_deviation);
  r.certificates["max_step_residual"] = S(rep.max_step_residual);
  r.certificates["max_hankel_residual"] = S(rep.max_hankel_residual);
  return r;
}

Result cmd_equilibrium(const Opts& o) {
  const Bits prec = precision(o);
  const Real t = o.real("t", prec);
  auto cc = critical_constants(prec);
  Result r;
  r.payload["critical"] = {{"t_cr", S(cc.t_cr)}, {"a_cr", S(cc.a_cr)}, {"b_cr", S(cc.b_cr)}};
  r.table.header = {"quantity", "value"};
  if (t >= cc.t_cr) {
    auto e = solve_endpoints(t, prec);
    r.payload["regime"] = "positive";
    r.payload["a"] = S(e.a);
    r.payload["b"] = S(e.b);
    r.payload["c"] = S(e.c);
    r.payload["nonnegative_density"] = e.positive;
    if (e.positive) r.payload["mass"] = S(density_mass(t, DensityMode::Regular, prec));
    r.certificates["endpoint_residual"] = S(e.residual);
    for (const char* k : {"a", "b", "c"}) r.table.rows.push_back({k, r.payload[k].get<std::string>()});
  } else {
    r.payload["regime"] = "signed";
  }
  if (t < cc.t_cr || o.flag("with-l")) {
    auto sd = solve_signed(t, prec);
    r.payload["signed"] = {{"a", S(cc.a_cr)}, {"b", S(sd.b)}, {"d0", S(sd.d0)}, {"d1", S(sd.d1)}};
    r.certificates["signed_residual"] = S(sd.residual);
    for (const char* k : {"b", "d0", "d1"})
      r.table.rows.push_back({std::string("signed_") + k, r.payload["signed"][k].get<std::string>()});
  }
  if (o.flag("with-l")) {
    auto gl = g_and_l(t, prec);
    r.payload["l"] = S(gl.l);
    r.certificates["l_spread"] = S(gl.spread);
    r.table.rows.push_back({"l", S(gl.l)});
  }
  return r;
}

Result cmd_phi_map(const Opts& o) {
  const Bits prec = precision(o);
  const Real t = o.real("t", prec);
  long n = o.integer("n");
  if (n < 1) throw UsageError("--n must be positive");
  PhiMaps pm(t, prec);
  Result r;
  r.payload["t"] = S(t);
  r.payload["q_at_a"] = S(pm.q_at_a());
  r.payload["s_star"] = S(pm.s_star(static_cast<int>(n)));
  json pts = json::array();
  r.table.header = {"z_re", "z_im", "phi_t_re", "phi_t_im", "phi_cr_re", "phi_cr_im", "f_re", "f_im"};
  for (const auto& zs : Opts::split(o.str("z"), ';')) {
    Complex z = Opts::parse_complex(zs, "z", prec);
    json pt{{"z", C(z)}, {"phi_t", C(pm.phi_t(z))}, {"phi_cr", C(pm.phi_cr(z))}};
    Complex fz(Real(0L, prec));
    bool near_a = abs(z - Complex(pm.constants().a_cr)) < pm.constants().a_cr;
    if (near_a) {
      fz = pm.f(z);
      pt["f"] = C(fz);
      pt["q"] = C(pm.q(z));
      pt["theta_relation_residual"] = S(pm.theta_relation_residual(z, static_cast<int>(n)));
    }
    pts.push_back(pt);
    r.table.rows.push_back({S(z.real()), S(z.imag()), S(pm.phi_t(z).real()), S(pm.phi_t(z).imag()),
                            S(pm.phi_cr(z).real()), S(pm.phi_cr(z).imag()), near_a ? S(fz.real()) : "",
                            near_a ? S(fz.imag()) : ""});
  }
  r.payload["points"] = pts;
  if (!o.str("sign-grid").empty()) {
    auto dims = o.int_list("sign-grid");
    if (dims.size() != 2 || dims[0] < 2 || dims[1] < 1) throw UsageError("--sign-grid expects nx,ny");
    SignGridSpec g;
    g.nx = dims[0];
    g.ny = dims[1];
    auto rep = sign_region_check(t, g, prec, false);
    r.payload["sign_region"] = {{"checks", rep.checks}, {"failures", rep.failures}, {"cells", rep.cells.size()}};
    r.certificates["theta_residual"] = S(rep.theta_residual);
    if (!rep.ok()) r.warnings.push_back("ASSERTION_FAILED");
    r.table.header = {"x", "y", "sign_re_phi_t"};
    r.table.rows.clear();
    for (const auto& c : rep.cells) r.table.rows.push_back({S(c.x), S(c.y), std::to_string(c.sign)});
  }
  return r;
}

Result cmd_p1_solve(const Opts& o) {
  const Bits prec = precision(o);
  Real s0 = o.real("s-start", prec), s1 = o.real("s-end", prec);
  long kmax = o.integer("kmax"), count = o.integer("samples");
  if (!(s0 < 0) || !(s0 < s1)) throw UsageError("need s-start < 0 and s-start < s-end");
  if (kmax < 1 || count < 2) throw UsageError("--kmax must be positive and --samples at least 2");
  auto sol = p1_solve(s0, s1, static_cast<int>(kmax), prec);
  Result r;
  r.payload["order"] = sol.K;
  r.payload["s_reached"] = S(sol.s_reached);
  r.payload["pole"] = sol.pole;
  if (sol.pole) {
    r.payload["pole_location"] = S(sol.pole_location);
    r.warnings.push_back("POLE_ENCOUNTERED");
  }
  json pts = json::array();
  r.table.header = {"s", "y", "dy", "hamiltonian"};
  for (const auto& pt : sol.sample(static_cast<int>(count))) {
    pts.push_back({{"s", S(pt.s)}, {"y", S(pt.y)}, {"dy", S(pt.dy)}, {"H", S(pt.H)}});
    r.table.rows.push_back({S(pt.s), S(pt.y), S(pt.dy), S(pt.H)});
  }
  r.payload["samples"] = pts;
  r.certificates["launch_tail"] = S(sol.launch_tail);
  r.certificates["hamiltonian_residual"] = S(sol.hamiltonian_residual(static_cast<int>(count)));
  return r;
}

Bits extraction_prec(Bits prec, int n) { return std::max<Bits>(prec, 16 * static_cast<Bits>(n)); }

ExtractionRecord extraction_at(int n, const Real& t, const Complex& alpha, Bits prec, bool with_dH,
                               const MomentSource& src) {
  auto in = finite_n_inputs(n, t, alpha, prec, with_dH, src);
  auto gl = g_and_l(t, prec);
  return extract_suite(in, gl.l, prec);
}

json record_json(const ExtractionRecord& rec) {
  json j{{"n", rec.n}, {"t", S(rec.t)}, {"s_star", S(rec.s_star)}, {"l", S(rec.l)}};
  if (rec.y_beta) j["y_beta"] = C(*rec.y_beta);
  if (rec.y_a) j["y_a"] = C(*rec.y_a);
  if (rec.y_dH) j["y_dH"] = C(*rec.y_dH);
  if (rec.H_gamma) j["H_gamma"] = C(*rec.H_gamma);
  j["inputs"] = {{"beta", C(rec.inputs.beta)}, {"a_nn", C(rec.inputs.a_nn)}, {"gamma2", C(rec.inputs.gamma2)}};
  if (rec.inputs.dH_dt) j["inputs"]["dH_dt"] = C(*rec.inputs.dH_dt);
  j["agreement_digits"] = rec.inputs.agreement_digits;
  j["prec"] = rec.inputs.prec;
  return j;
}

std::string re_or_empty(const std::optional<Complex>& z) { return z ? S(z->real()) : ""; }

Result cmd_ds_extract(const Opts& o) {
  long n = o.integer("n");
  if (n < 1) throw UsageError("--n must be positive");
  const Bits prec = extraction_prec(precision(o), static_cast<int>(n));
  auto cc = critical_constants(prec);
  Real t = o.str("t").empty() ? t_of_s_star(static_cast<int>(n), o.real("sstar", prec), cc) : o.real("t", prec);
  auto rec = extraction_at(static_cast<int>(n), t, o.complex("alpha", prec), prec, o.flag("dh"), moment_source());
  Result r;
  r.payload = record_json(rec);
  r.certificates["agreement_digits"] = rec.inputs.agreement_digits;
  r.table.header = {"n", "t", "s_star", "y_beta", "y_a", "y_dH", "H_gamma"};
  r.table.rows.push_back({std::to_string(rec.n), S(rec.t), S(rec.s_star), re_or_empty(rec.y_beta),
                          re_or_empty(rec.y_a), re_or_empty(rec.y_dH), re_or_empty(rec.H_gamma)});
  return r;
}

json consistency_payload(const ConsistencyReport& rep, Table& table) {
  json levels = json::array();
  table.header = {"n", "s_star", "y_beta", "y_a", "y_dH", "H", "pole_suspect", "spread_a", "spread_dH", "p1_residual",
                  "hamiltonian_residual"};
  for (const auto& lv : rep.levels) {
    json pts = json::array();
    for (const auto& p : lv.points) {
      json pj{{"s_star", S(p.s_star)}, {"y_beta", C(p.y_beta)}, {"y_a", C(p.y_a)},   {"y_dH", C(p.y_dH)},
              {"H", C(p.H)},           {"pole_suspect", p.pole_suspect},          {"spread_a", S(p.spread_a)},
              {"spread_dH", S(p.spread_dH)}};
      if (p.p1_residual) pj["p1_residual"] = S(*p.p1_residual);
      if (p.hamiltonian_residual) pj["hamiltonian_residual"] = S(*p.hamiltonian_residual);
      pts.push_back(pj);
      table.rows.push_back({std::to_string(lv.n), S(p.s_star), S(p.y_beta.real()), S(p.y_a.real()),
                            S(p.y_dH.real()), S(p.H.real()), p.pole_suspect ? "1" : "0", S(p.spread_a),
                            S(p.spread_dH), p.p1_residual ? S(*p.p1_residual) : "",
                            p.hamiltonian_residual ? S(*p.hamiltonian_residual) : ""});
    }
    levels.push_back({{"n", lv.n},
                      {"flagged", lv.flagged},
                      {"max_spread", S(lv.max_spread)},
                      {"max_p1_residual", S(lv.max_p1_residual)},
                      {"max_hamiltonian_residual", S(lv.max_hamiltonian_residual)},
                      {"points", pts}});
  }
  json trend{{"improved_count", rep.improved_count},
             {"spread_improved", rep.spread_improved},
             {"residuals_shrink", rep.residuals_shrink}};
  return json{{"levels", levels}, {"trend", trend}};
}

Result run_consistency(const std::vector<int>& ns, const std::string& grid_text, const Complex& alpha_in, double cap,
                       int jobs, Bits prec) {
  RunConfig gc{"", {{"sstar-grid", grid_text}}};
  const auto src = moment_source();
  std::vector<std::vector<ExtractionRecord>> records;
  json digits = json::object();
  int fewest = 1 << 30;
  for (int n : ns) {
    if (n < 1) throw UsageError("--n-list entries must be positive");
    const Bits p = extraction_prec(prec, n);
    auto cc = critical_constants(p);
    auto grid = Opts(gc).grid("sstar-grid", p);
    const Complex alpha(Real(alpha_in.real(), p), Real(alpha_in.imag(), p));
    std::vector<std::future<ExtractionRecord>> futs;
    std::vector<ExtractionRecord> level;
    auto task = [&, n, p](Real s) { return extraction_at(n, t_of_s_star(n, s, cc), alpha, p, true, src); };
    for (const auto& s : grid) {
      futs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, task, s));
      if (static_cast<int>(futs.size()) >= std::max(1, jobs)) {
        for (auto& f : futs) level.push_back(f.get());
        futs.clear();
      }
    }
    for (auto& f : futs) level.push_back(f.get());
    int d = 1 << 30;
    for (const auto& rec : level) d = std::min(d, rec.inputs.agreement_digits);
    digits[std::to_string(n)] = d;
    fewest = std::min(fewest, d);
    records.push_back(std::move(level));
  }
  auto rep = pi_consistency_check(records, cap, prec);
  Result r;
  r.payload = consistency_payload(rep, r.table);
  r.certificates["agreement_digits_by_n"] = digits;
  for (const auto& lv : rep.levels)
    if (lv.flagged > 0) {
      r.warnings.push_back("POLE_SUSPECT");
      break;
    }
  if (fewest < 10) r.warnings.push_back("LOW_AGREEMENT");
  return r;
}

Result cmd_consistency(const Opts& o) {
  const Bits prec = precision(o);
  double cap = o.real("pole-cap", 64).to_double();
  long jobs = o.integer("jobs");
  if (!(cap > 0) || jobs < 1) throw UsageError("--pole-cap and --jobs must be positive");
  o.grid("sstar-grid", prec);
  return run_consistency(o.int_list("n-list"), o.str("sstar-grid"), o.complex("alpha", prec), cap,
                         static_cast<int>(jobs), prec);
}

// ---- envelope -------------------------------------------------------------

json config_json(const RunConfig& c) {
  json opts = json::object();
  for (const auto& [k, v] : c.options) opts[k] = v;
  return json{{"command", c.command}, {"options", opts}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::string render(const RunConfig& c, const std::string& status, const Result& r, const json& error,
                   std::optional<double> seconds) {
  if (c.options.at("format") == "csv") {
    std::ostringstream out;
    out << "# " << kToolName << " " << kToolVersion << " schema " << kSchemaVersion << " command " << c.command
        << " status " << status;
    for (const auto& w : r.warnings) out << " " << w;
    if (!error.is_null()) out << " " << error["code"].get<std::string>();
    out << "\n";
    for (std::size_t i = 0; i < r.table.header.size(); ++i) out << (i ? "," : "") << csv_field(r.table.header[i]);
    if (!r.table.header.empty()) out << "\n";
    for (const auto& row : r.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << "\n";
    }
    return out.str();
  }
  json env{{"tool", kToolName}, {"version", kToolVersion}, {"schema", kSchemaVersion}, {"config", config_json(c)}};
  if (seconds) env["timing"] = {{"wall_seconds", *seconds}};
  env["status"] = status;
  env["warnings"] = r.warnings;
  if (!error.is_null()) env["error"] = error;
  env["certificates"] = r.certificates;
  env["payload"] = r.payload;
  return env.dump(2) + "\n";
}

void emit(const RunConfig& c, const std::string& text) {
  const auto& path = c.options.at("out");
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int execute(const RunConfig& c);

Result cmd_report_all(const RunConfig& c) {
  const Opts o(c);
  const fs::path dir = o.str("out-dir");
  fs::create_directories(dir);
  const std::string cache = (dir / "cache").string();
  const char* env = std::getenv("HP_CACHE_DIR");
  const bool own_cache = env == nullptr || *env == '\0';
  if (own_cache) setenv("HP_CACHE_DIR", cache.c_str(), 1);
  const std::string prec = o.str("prec");
  const std::string fmt = o.str("format");
  auto first_n = std::to_string(o.int_list("n-list").front());
  // ds-extract runs first so consistency picks its moment tables from the cache.
  std::vector<RunConfig> steps = {
      {"equilibrium", {{"t", "0"}, {"with-l", "false"}}},
      {"equilibrium", {{"t", "-0.0486692"}, {"with-l", "true"}}},
      {"phi-map", {{"t", "-0.0486692"}, {"z", "0.05,0.03;1.5,-0.7"}, {"n", "64"}, {"sign-grid", "30,15"}}},
      {"p1-solve", {{"s-start", "-30"}, {"s-end", "2"}, {"kmax", "200"}, {"samples", "65"}}},
      {"ds-extract", {{"n", first_n}, {"t", ""}, {"sstar", "0"}, {"alpha", o.str("alpha")}, {"dh", "true"}}},
      {"consistency",
       {{"n-list", o.str("n-list")},
        {"sstar-grid", o.str("sstar-grid")},
        {"alpha", o.str("alpha")},
        {"pole-cap", "10"},
        {"jobs", "1"}}},
  };
  Result r;
  json files = json::array();
  int worst = kExitOk;
  int index = 0;
  for (auto& s : steps) {
    s.options["prec"] = prec;
    s.options["format"] = fmt;
    s.options["timing"] = o.str("timing");
    const std::string name = std::to_string(index++) + "-" + s.command + "." + fmt;
    s.options["out"] = (dir / name).string();
    int code = execute(s);
    files.push_back({{"command", s.command}, {"file", name}, {"exit", code}});
    if (code == kExitError) worst = kExitError;
    else if (code == kExitWarning && worst == kExitOk) worst = kExitWarning;
  }
  if (own_cache) unsetenv("HP_CACHE_DIR");
  r.payload["runs"] = files;
  if (worst == kExitError) r.warnings.push_back("STEP_FAILED");
  else if (worst == kExitWarning) r.warnings.push_back("STEP_WARNING");
  r.table.header = {"command", "file", "exit"};
  for (const auto& f : files)
    r.table.rows.push_back(
        {f["command"].get<std::string>(), f["file"].get<std::string>(), std::to_string(f["exit"].get<int>())});
  return r;
}

Result dispatch(const RunConfig& c) {
  const Opts o(c);
  const auto& f = c.options.at("format");
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  precision(o);
  o.flag("timing");
  if (c.command == "moments") return cmd_moments(o);
  if (c.command == "hankel") return cmd_hankel(o);
  if (c.command == "recurrence") return cmd_recurrence(o);
  if (c.command == "identities") return cmd_identities(o);
  if (c.command == "p3-verify") return cmd_p3_verify(o);
  if (c.command == "equilibrium") return cmd_equilibrium(o);
  if (c.command == "phi-map") return cmd_phi_map(o);
  if (c.command == "p1-solve") return cmd_p1_solve(o);
  if (c.command == "ds-extract") return cmd_ds_extract(o);
  if (c.command == "consistency") return cmd_consistency(o);
  if (c.command == "report-all") return cmd_report_all(c);
  throw UsageError("unknown command " + c.command);
}

int execute(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  json error;
  std::string status = "ok";
  int code = kExitOk;
  try {
    r = dispatch(c);
    if (!r.warnings.empty()) {
      status = "warning";
      code = kExitWarning;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const NumericError& e) {
    r = Result{};
    status = "error";
    code = kExitError;
    error = {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    r = Result{};
    status = "error";
    code = kExitError;
    error = {{"code", "INTERNAL"}, {"message", e.what()}};
  }
  std::optional<double> seconds;
  if (c.options.at("timing") == "true" || c.options.at("timing") == "1")
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(c, render(c, status, r, error, seconds));
  return code;
}

// Turns `--config file` into the stored command and options, placed before
// the remaining arguments so those override.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError(path + " is not JSON");
  const json& cfg = j.contains("config") ? j["config"] : j;
  if (!cfg.contains("command") || !cfg.contains("options")) throw UsageError(path + " has no command/options");
  const std::string command = cfg["command"].get<std::string>();
  if (!rest.empty() && rest.front() == command) rest.erase(rest.begin());
  else if (!rest.empty() && rest.front().rfind("--", 0) != 0) throw UsageError("command differs from " + path);
  std::vector<std::string> out{command};
  for (const auto& [k, v] : cfg["options"].items()) {
    out.push_back("--" + k);
    out.push_back(v.get<std::string>());
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

RunConfig parse(const std::vector<std::string>& raw) {
  auto args = expand_config(raw);
  CLI::App app{"High-precision checks for Hankel determinants with a perturbed Laguerre weight", kToolName};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> store;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    auto& values = store[cmd.name];
    std::vector<OptionSpec> all = kCommon;
    if (cmd.weight) all.insert(all.end(), kWeight.begin(), kWeight.end());
    all.insert(all.end(), cmd.options.begin(), cmd.options.end());
    for (const auto& opt : all) {
      values[opt.name] = opt.def;
      sub->add_option("--" + opt.name, values[opt.name], opt.help)
          ->capture_default_str()
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    throw Exit{code == 0 ? kExitOk : kExitUsage};
  }
  RunConfig c;
  for (const auto* sub : app.get_subcommands()) {
    c.command = sub->get_name();
    c.options = store[c.command];
  }
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig c;
  try {
    c = parse(args);
  } catch (const Exit& e) {
    return e.code;
  } catch (const UsageError& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return execute(c);
  } catch (const UsageError& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace pertlag::cli
