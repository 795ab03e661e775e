#pragma once

#include <functional>
#include <vector>

#include "pertlag/numkernel/quadrature.hpp"

namespace pertlag {

// Problem parameters of the perturbed Laguerre weight z^n e^{-nz - nt/z}
// carried on three contour pieces with constants 1, alpha, 1 - alpha.
struct WeightParams {
  int n = 1;
  Real t;
  Complex alpha;
  Real delta;

  void validate() const;
};

// Contour piece tags: 1 is the outward ray, 2 the upper arc, 3 the lower arc.
enum class Branch { Ray = 1, Upper = 2, Lower = 3 };

Complex branch_constant(Branch b, const WeightParams& p);

// c_j e^{-n V_t(z)} with V_t(z) = z - log z + t/z and the principal log.
// Throws BRANCH_CUT for z on (-inf, 0].
Complex eval_weight(const Complex& z, Branch b, const WeightParams& p);

struct ContourPiece {
  PathSegment<Real> seg;
  Complex constant;
  Branch branch;
  EndpointHint hint = EndpointHint::None;
};

struct Contour {
  std::vector<ContourPiece> pieces;
  Real cutoff;  // where the ray is truncated
};

// Ray cutoff R such that the discarded tail of |z|^m e^{-n Re V_t} beyond R is
// below tol relative to the moment scale, for every power m used by moments
// j = -1..jmax.
Real ray_cutoff(const WeightParams& p, int jmax, double log2_tol);

// The literal contour: upper and lower semicircles |z - delta| = delta from 0
// to 2 delta, then the ray from 2 delta to the cutoff.
Contour build_contour(const WeightParams& p, int jmax, const Real& truncation_tol);

// The homotopic path that moments are actually integrated on. It avoids the
// oscillation of e^{-nt/z} on the circle near the origin (see README).
Contour moment_path(const WeightParams& p, int jmax, Bits prec);

struct MomentEntry {
  int j;
  Complex value;
  Real err;
};

struct MomentTable {
  WeightParams params;
  Bits prec = 0;
  std::vector<MomentEntry> entries;  // j = 0..jmax
  MomentEntry inverse;               // j = -1, the integral of w(z)/z
  long evaluations = 0;

  const Complex& mu(int j) const { return j < 0 ? inverse.value : entries.at(j).value; }
  int jmax() const { return static_cast<int>(entries.size()) - 1; }
};

// All moments j = -1..jmax from one shared set of quadrature nodes.
// Throws NONCONVERGENCE (with the best estimate in the message).
MomentTable moment_table(const WeightParams& p, int jmax, Bits prec);

Complex moment(int j, const WeightParams& p, Bits prec);

// int g(z) z^n e^{-n z - n t / z} dz over the moment path with the contour
// constants. g must be analytic between the literal contour and the path;
// Cauchy kernels 1/(z - z0) qualify when |z0| > 2 delta off the positive axis.
// degree bounds the polynomial growth of g and sets the ray cutoff.
Complex weighted_integral(const WeightParams& p, int degree, Bits prec,
                          const std::function<Complex(const Complex&)>& g);

// Closed form 2 t^{nu/2} K_nu(2 n sqrt t), nu = n + j + 1, for t > 0, with
// K_nu from its integral representation. Throws DOMAIN for t <= 0.
Real moment_oracle(int j, const WeightParams& p, Bits prec);

// K_nu(x) = int_0^inf e^{-x cosh u} cosh(nu u) du, x > 0.
Real bessel_k(const Real& nu, const Real& x, Bits prec);

}  // namespace pertlag
