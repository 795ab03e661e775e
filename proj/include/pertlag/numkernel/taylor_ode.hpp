#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pertlag/numkernel/error.hpp"
#include "pertlag/numkernel/scalar.hpp"

namespace pertlag {

// A first-order system y' = F(s, y) described by its Taylor recurrence:
// given the coefficients 0..k of every component about s0, produce
// coefficient k+1 of every component. Polynomial right-hand sides make this
// an exact convolution recurrence.
template <class R>
struct TaylorSystem {
  int dim = 1;
  std::function<void(const R& s0, int k, const std::vector<std::vector<R>>& coeffs, std::vector<R>& next)> next;
};

template <class R>
struct OdeSpec {
  R tol;                 // local truncation tolerance per step, relative to max(1, |y|)
  int order = 30;        // Taylor order per step
  R h_min;               // smaller steps raise STEP_UNDERFLOW
  R h_max;               // 0 means unlimited
  R pole_halt_distance;  // stop once an estimated pole is this close ahead
  long max_steps = 200000;
};

enum class OdeStatus { Ok, PoleEncountered, StepUnderflow };

template <class R>
struct TaylorStep {
  R s0;
  R h;
  std::vector<std::vector<R>> coeffs;  // [component][order]
};

template <class R>
struct SolutionGrid {
  std::vector<TaylorStep<R>> steps;
  OdeStatus status = OdeStatus::Ok;
  R s_start;
  R s_reached;
  R pole_estimate;  // meaningful only when status == PoleEncountered

  bool empty() const { return steps.empty(); }

  // d-th derivative of every component at s, from the stored local series.
  std::vector<R> eval(const R& s, int deriv = 0) const {
    const TaylorStep<R>* st = &steps.back();
    for (const auto& step : steps) {
      if (step.h == 0) continue;
      R rel = (s - step.s0) / step.h;
      if (rel >= -1e-12 && rel <= 1.0 + 1e-12) {
        st = &step;
        break;
      }
    }
    const R x = s - st->s0;
    std::vector<R> out;
    for (const auto& c : st->coeffs) {
      const int n = static_cast<int>(c.size());
      R acc = lift<R>(0.0, Num<R>::bits(x));
      for (int k = n - 1; k >= deriv; --k) {
        R term = c[k];
        for (int j = 0; j < deriv; ++j) term *= static_cast<long>(k - j);
        acc = acc * x + term;
      }
      out.push_back(acc);
    }
    return out;
  }

  // States at accepted step boundaries, including the start.
  std::vector<std::pair<R, std::vector<R>>> nodes() const {
    std::vector<std::pair<R, std::vector<R>>> out;
    for (const auto& st : steps) {
      std::vector<R> y;
      for (const auto& c : st.coeffs) y.push_back(c[0]);
      out.emplace_back(st.s0, std::move(y));
    }
    return out;
  }
};

namespace ode_detail {

template <class R>
R horner(const std::vector<R>& c, const R& h) {
  R acc = c.back();
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) acc = acc * h + c[k];
  return acc;
}

}  // namespace ode_detail

// Adaptive Taylor integration from s0 toward s1 (either direction).
template <class R>
SolutionGrid<R> ode_solve(const TaylorSystem<R>& sys, std::vector<R> y0, const R& s0, const R& s1,
                          const OdeSpec<R>& spec) {
  using std::abs;
  using std::pow;
  const Bits prec = Num<R>::bits(spec.tol);
  const int N = std::max(spec.order, 4);
  const double dir = (s1 < s0) ? -1.0 : 1.0;
  SolutionGrid<R> grid;
  grid.s_start = s0;
  grid.s_reached = s0;
  grid.pole_estimate = lift<R>(0.0, prec);

  R s = s0;
  std::vector<R> y = std::move(y0);
  std::vector<std::vector<R>> c(sys.dim);
  std::vector<R> next(sys.dim);
  for (long step = 0; step < spec.max_steps; ++step) {
    R remaining = abs(s1 - s);
    if (remaining == 0) break;
    for (int i = 0; i < sys.dim; ++i) c[i].assign(1, y[i]);
    for (int k = 0; k < N; ++k) {
      sys.next(s, k, c, next);
      for (int i = 0; i < sys.dim; ++i) c[i].push_back(next[i]);
    }
    // Step from the last two coefficients: |c_N| h^N <= tol * scale.
    R h = remaining;
    double pole_dist_d = -1.0;
    R pole_dist = lift<R>(0.0, prec);
    for (int i = 0; i < sys.dim; ++i) {
      R scale = abs(y[i]);
      if (scale < 1.0) scale = lift<R>(1.0, prec);
      for (int m : {N - 1, N}) {
        R cm = abs(c[i][m]);
        if (cm == 0) continue;
        R hm = pow(R(spec.tol * scale / cm), lift<R>(1.0 / m, prec));
        hm *= 0.9;
        if (hm < h) h = hm;
      }
      // Domb-Sykes style estimate of a real singularity ahead: with
      // r_k = c_k / c_{k-1} ~ (1 + beta / k) / p, the combination
      // N r_N - (N-1) r_{N-1} removes the algebraic exponent.
      if (!(c[i][N - 1] == 0) && !(c[i][N - 2] == 0)) {
        R rN = c[i][N] / c[i][N - 1];
        R rM = c[i][N - 1] / c[i][N - 2];
        R inv = rN * static_cast<long>(N) - rM * static_cast<long>(N - 1);
        // Trust it only when consecutive ratios agree in sign and size; a
        // complex-conjugate pair of singularities makes them oscillate.
        const double q = Num<R>::to_double(rN / rM);
        const bool steady = q > 0.8 && q < 1.25 && Num<R>::to_double(rN) * dir > 0;
        if (steady && !(inv == 0)) {
          R p = 1.0 / inv;
          if (Num<R>::to_double(p) * dir > 0) {
            if (pole_dist_d < 0 || abs(p) < pole_dist) {
              pole_dist = abs(p);
              pole_dist_d = Num<R>::to_double(pole_dist);
            }
          }
        }
      }
    }
    if (!(spec.h_max == 0) && h > spec.h_max) h = spec.h_max;
    bool final_step = h >= remaining;
    if (final_step) h = remaining;
    TaylorStep<R> st{s, dir > 0 ? h : R(-h), c};
    grid.steps.push_back(st);
    // A pole counts only when it lies ahead within the halt distance and the
    // step size has collapsed toward it (the ratio test is then reliable).
    if (pole_dist_d >= 0 && pole_dist < spec.pole_halt_distance && !final_step && pole_dist < h * 8) {
      grid.status = OdeStatus::PoleEncountered;
      grid.pole_estimate = dir > 0 ? R(s + pole_dist) : R(s - pole_dist);
      grid.s_reached = s;
      return grid;
    }
    if (!final_step && h < spec.h_min) {
      grid.status = OdeStatus::StepUnderflow;
      grid.s_reached = s;
      if (pole_dist_d >= 0) grid.pole_estimate = dir > 0 ? R(s + pole_dist) : R(s - pole_dist);
      return grid;
    }
    R hs = dir > 0 ? h : R(-h);
    for (int i = 0; i < sys.dim; ++i) y[i] = ode_detail::horner(c[i], hs);
    s = final_step ? s1 : R(s + hs);
    grid.s_reached = s;
    if (final_step) break;
  }
  // Closing node so eval() and nodes() cover s1 itself.
  for (int i = 0; i < sys.dim; ++i) c[i].assign(1, y[i]);
  for (int k = 0; k < N; ++k) {
    sys.next(s, k, c, next);
    for (int i = 0; i < sys.dim; ++i) c[i].push_back(next[i]);
  }
  grid.steps.push_back(TaylorStep<R>{s, lift<R>(dir, prec) * 0, c});
  return grid;
}

}  // namespace pertlag
