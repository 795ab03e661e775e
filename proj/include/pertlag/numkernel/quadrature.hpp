#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "pertlag/numkernel/path.hpp"

namespace pertlag {

// Which endpoints of a segment carry an integrable endpoint behaviour
// (algebraic or faster decay). Any hint switches the segment to tanh-sinh.
enum class EndpointHint { None, Start, End, Both };

template <class R>
struct QuadratureSpec {
  R abs_tol;
  R rel_tol;
  int max_depth = 18;
  EndpointHint hint = EndpointHint::None;
  // Exponent of the algebraic endpoint behaviour, informational for callers.
  double decay_exponent = 0.0;
  // Optional per-component absolute tolerances overriding abs_tol, for
  // vector integrands whose components differ wildly in scale.
  std::vector<R> component_abs_tol = {};
};

template <class R>
struct QuadResult {
  complex_of<R> value;
  R err;
  bool converged = false;
  long evaluations = 0;
};

template <class R>
struct VecQuadResult {
  std::vector<complex_of<R>> values;
  std::vector<R> errors;
  bool converged = false;
  long evaluations = 0;
};

// Vector-valued integrand. It must add scale * f_i(z) to acc[i] for every
// component; passing the scale in lets callers fold the quadrature weight into
// a shared factor instead of multiplying every component twice.
template <class R>
using VecIntegrand =
    std::function<void(const complex_of<R>& z, const complex_of<R>& scale, std::span<complex_of<R>> acc)>;

template <class R>
using ScalarIntegrand = std::function<complex_of<R>(const complex_of<R>&)>;

namespace quad_detail {

// A node on [0, 1] stored together with its distance to 1.
template <class R>
struct Node {
  R u, v, w;
};

template <class R>
R from_long(long k, Bits p) {
  return lift<R>(static_cast<double>(k), p);
}

template <class R>
std::vector<Node<R>> make_gauss_legendre(int order, Bits prec) {
  using std::abs;
  std::vector<Node<R>> nodes(order);
  const R one = lift<R>(1.0, prec);
  const R tiny = Num<R>::ldexp(one, -(prec / 2 + 4));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Polish a machine-precision estimate with Newton steps at full precision.
    double xd = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xd;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * xd * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = order * (xd * p1 - p0) / (xd * xd - 1.0);
      double dx = p1 / dp;
      xd -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    R x = lift<R>(xd, prec);
    R dp = one;
    bool last = false;
    for (int it = 0; it < 64; ++it) {
      R p0 = one, p1 = x;
      for (int k = 2; k <= order; ++k) {
        R p2 = (x * p1 * (2 * k - 1) - p0 * (k - 1)) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = (x * p1 - p0) * order / (x * x - one);
      R dx = p1 / dp;
      x -= dx;
      if (last) break;
      if (abs(dx) < tiny) last = true;
    }
    if (order % 2 == 1 && i == half - 1) x = lift<R>(0.0, prec);
    R w = lift<R>(2.0, prec) / ((one - x * x) * dp * dp);
    // Map x in [-1, 1] to u = (1 + x) / 2, keeping both u and 1 - u exact.
    R up = (one + x) / 2, vp = (one - x) / 2;
    nodes[i] = {vp, up, w / 2};
    nodes[order - 1 - i] = {up, vp, w / 2};
  }
  return nodes;
}

// Tanh-sinh abscissae for one refinement level; level 0 holds tau = j for all
// integers j, level k > 0 the odd multiples of 2^-k.
template <class R>
std::vector<Node<R>> make_tanh_sinh_level(int level, Bits prec) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  const R one = lift<R>(1.0, prec);
  const R pi = Num<R>::pi(prec);
  const double tmax = std::asinh((static_cast<double>(prec) + 64.0) * 0.6931471805599453 / M_PI) + 0.5;
  const long denom = 1L << level;
  const long jmax = static_cast<long>(std::ceil(tmax * denom));
  std::vector<Node<R>> nodes;
  for (long j = -jmax; j <= jmax; ++j) {
    if (level > 0 && j % 2 == 0) continue;
    R tau = from_long<R>(j, prec) / from_long<R>(denom, prec);
    R s = pi * sinh(tau);
    // u = 1 / (1 + e^{-s}), 1 - u = 1 / (1 + e^{s}), du/dtau = u (1 - u) pi cosh(tau)
    R ep = exp(s);
    R u = ep / (one + ep);
    R v = one / (one + ep);
    R w = u * v * pi * cosh(tau);
    nodes.push_back({std::move(u), std::move(v), std::move(w)});
  }
  return nodes;
}

template <class R>
struct RuleCache {
  std::mutex mu;
  std::map<std::pair<int, Bits>, std::shared_ptr<const std::vector<Node<R>>>> gauss;
  std::map<std::pair<int, Bits>, std::shared_ptr<const std::vector<Node<R>>>> tanh_sinh;
  static RuleCache& instance() {
    static RuleCache cache;
    return cache;
  }
};

template <class R>
std::shared_ptr<const std::vector<Node<R>>> gauss_rule(int order, Bits prec) {
  auto& c = RuleCache<R>::instance();
  std::lock_guard lock(c.mu);
  auto key = std::make_pair(order, prec);
  auto it = c.gauss.find(key);
  if (it != c.gauss.end()) return it->second;
  auto rule = std::make_shared<const std::vector<Node<R>>>(make_gauss_legendre<R>(order, prec));
  c.gauss.emplace(key, rule);
  return rule;
}

template <class R>
std::shared_ptr<const std::vector<Node<R>>> tanh_sinh_rule(int level, Bits prec) {
  auto& c = RuleCache<R>::instance();
  std::lock_guard lock(c.mu);
  auto key = std::make_pair(level, prec);
  auto it = c.tanh_sinh.find(key);
  if (it != c.tanh_sinh.end()) return it->second;
  auto rule = std::make_shared<const std::vector<Node<R>>>(make_tanh_sinh_level<R>(level, prec));
  c.tanh_sinh.emplace(key, rule);
  return rule;
}

// Base Gauss order for a working precision: higher precision wants higher
// order per panel rather than many more panels. The error estimate is that of
// the order-m rule, so m has to be large enough on its own.
inline int gauss_base_order(Bits prec) {
  int m = static_cast<int>(prec / 8);
  m = std::clamp(m, 12, 240);
  return m;
}

template <class R>
void accumulate_rule(const VecIntegrand<R>& f, const PathSegment<R>& seg, const std::vector<Node<R>>& rule,
                     const R& u0, const R& v1, const R& width, std::span<complex_of<R>> acc) {
  using C = complex_of<R>;
  C z, dz;
  for (const auto& nd : rule) {
    // u = u0 + width * nu, 1 - u = v1 + width * nv, with v1 = 1 - u1.
    R u = u0 + width * nd.u;
    R v = v1 + width * nd.v;
    seg.eval(u, v, z, dz);
    C scale = dz * (nd.w * width);
    f(z, scale, acc);
  }
}

template <class R>
R tolerance_for(const QuadratureSpec<R>& spec, const complex_of<R>& value, std::size_t i) {
  using std::abs;
  R rel = spec.rel_tol * abs(value);
  const R& at = i < spec.component_abs_tol.size() ? spec.component_abs_tol[i] : spec.abs_tol;
  return rel > at ? rel : at;
}

template <class R>
VecQuadResult<R> gauss_adaptive(const VecIntegrand<R>& f, std::size_t m, const PathSegment<R>& seg,
                                const QuadratureSpec<R>& spec, Bits prec) {
  using C = complex_of<R>;
  using std::abs;
  const int order = gauss_base_order(prec);
  auto lo = gauss_rule<R>(order, prec);
  auto hi = gauss_rule<R>(2 * order, prec);

  struct Panel {
    R u0, v1, width;
    int depth;
    std::vector<C> value;
    std::vector<R> err;
  };
  const C zero = lift_c<R>(0.0, 0.0, prec);
  long evals = 0;
  auto evaluate = [&](R u0, R v1, R width, int depth) {
    Panel p{std::move(u0), std::move(v1), std::move(width), depth, std::vector<C>(m, zero), std::vector<R>(m)};
    std::vector<C> coarse(m, zero);
    accumulate_rule<R>(f, seg, *lo, p.u0, p.v1, p.width, coarse);
    accumulate_rule<R>(f, seg, *hi, p.u0, p.v1, p.width, p.value);
    evals += static_cast<long>(lo->size() + hi->size());
    for (std::size_t i = 0; i < m; ++i) p.err[i] = abs(p.value[i] - coarse[i]);
    return p;
  };

  const R one = lift<R>(1.0, prec);
  std::vector<Panel> panels;
  panels.push_back(evaluate(lift<R>(0.0, prec), lift<R>(0.0, prec), one, 0));

  VecQuadResult<R> out;
  out.values.assign(m, zero);
  out.errors.assign(m, lift<R>(0.0, prec));
  for (;;) {
    // Totals are summed in panel order (left to right) for determinism.
    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.u0 < b.u0; });
    std::vector<C> total(m, zero);
    std::vector<R> err(m, lift<R>(0.0, prec));
    for (const auto& p : panels)
      for (std::size_t i = 0; i < m; ++i) {
        total[i] += p.value[i];
        err[i] += p.err[i];
      }
    std::vector<R> tol(m);
    bool done = true;
    for (std::size_t i = 0; i < m; ++i) {
      tol[i] = tolerance_for(spec, total[i], i);
      if (err[i] > tol[i]) done = false;
    }
    out.values = total;
    out.errors = err;
    out.evaluations = evals;
    if (done) {
      out.converged = true;
      return out;
    }
    // Split the panel with the worst normalised error.
    std::size_t worst = 0;
    double worst_ratio = -1.0;
    for (std::size_t k = 0; k < panels.size(); ++k) {
      double r = 0.0;
      for (std::size_t i = 0; i < m; ++i) r = std::max(r, Num<R>::to_double(panels[k].err[i] / tol[i]));
      if (r > worst_ratio) {
        worst_ratio = r;
        worst = k;
      }
    }
    Panel p = std::move(panels[worst]);
    panels.erase(panels.begin() + static_cast<long>(worst));
    if (p.depth >= spec.max_depth) {
      out.converged = false;
      return out;
    }
    R half = p.width / 2;
    R mid_u = p.u0 + half;
    R mid_v = p.v1 + half;
    panels.push_back(evaluate(p.u0, mid_v, half, p.depth + 1));
    panels.push_back(evaluate(mid_u, p.v1, half, p.depth + 1));
  }
}

template <class R>
VecQuadResult<R> tanh_sinh(const VecIntegrand<R>& f, std::size_t m, const PathSegment<R>& seg,
                           const QuadratureSpec<R>& spec, Bits prec) {
  using C = complex_of<R>;
  using std::abs;
  const C zero = lift_c<R>(0.0, 0.0, prec);
  const R zero_r = lift<R>(0.0, prec);
  const R one = lift<R>(1.0, prec);
  std::vector<C> raw(m, zero);  // sum of w * f without the step factor
  std::vector<C> prev, prev2;
  VecQuadResult<R> out;
  const int max_level = std::max(1, spec.max_depth);
  for (int level = 0; level <= max_level; ++level) {
    auto rule = tanh_sinh_rule<R>(level, prec);
    accumulate_rule<R>(f, seg, *rule, zero_r, zero_r, one, raw);
    out.evaluations += static_cast<long>(rule->size());
    R h = Num<R>::ldexp(one, -level);
    std::vector<C> cur(m);
    for (std::size_t i = 0; i < m; ++i) cur[i] = raw[i] * h;
    if (level >= 2) {
      bool done = true;
      out.errors.assign(m, zero_r);
      for (std::size_t i = 0; i < m; ++i) {
        R d1 = abs(cur[i] - prev[i]);
        R d2 = abs(prev[i] - prev2[i]);
        // Each level roughly doubles the correct digits, so the error of the
        // newest sum is about d1^2 / d2 once the sequence is converging.
        R e = d1;
        if (d2 > d1 && !(d2 == 0)) {
          R q = d1 * d1 / d2;
          R floor_e = Num<R>::eps(prec) * abs(cur[i]) * 8;
          e = q > floor_e ? q : floor_e;
        }
        out.errors[i] = e;
        if (e > tolerance_for(spec, cur[i], i)) done = false;
      }
      out.values = cur;
      if (done) {
        out.converged = true;
        return out;
      }
    }
    prev2 = std::move(prev);
    prev = std::move(cur);
  }
  out.converged = false;
  return out;
}

}  // namespace quad_detail

template <class R>
VecQuadResult<R> quad_segment_vec(const VecIntegrand<R>& f, std::size_t components, const PathSegment<R>& seg,
                                  const QuadratureSpec<R>& spec) {
  const Bits prec = std::max(Num<R>::bits(spec.rel_tol), Num<R>::bits(seg.start()));
  VecQuadResult<R> r = spec.hint == EndpointHint::None
                           ? quad_detail::gauss_adaptive<R>(f, components, seg, spec, prec)
                           : quad_detail::tanh_sinh<R>(f, components, seg, spec, prec);
  if (seg.reversed())
    for (auto& v : r.values) v = -v;
  return r;
}

template <class R>
QuadResult<R> quad_segment(const ScalarIntegrand<R>& f, const PathSegment<R>& seg, const QuadratureSpec<R>& spec) {
  using C = complex_of<R>;
  VecIntegrand<R> vf = [&f](const C& z, const C& scale, std::span<C> acc) { acc[0] += scale * f(z); };
  auto r = quad_segment_vec<R>(vf, 1, seg, spec);
  return {r.values[0], r.errors[0], r.converged, r.evaluations};
}

}  // namespace pertlag
