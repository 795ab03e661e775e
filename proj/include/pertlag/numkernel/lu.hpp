#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pertlag/numkernel/scalar.hpp"

namespace pertlag {

template <class T>
struct RealOf {
  using type = T;
};
template <>
struct RealOf<std::complex<double>> {
  using type = double;
};
template <>
struct RealOf<Complex> {
  using type = Real;
};
template <class T>
using real_of = typename RealOf<T>::type;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

namespace lu_detail {

// Cheap pivot magnitude: max(|re|, |im|). Within a factor sqrt(2) of |x|.
inline double pivot_size(double x) { return std::abs(x); }
inline double pivot_size(const std::complex<double>& x) { return std::max(std::abs(x.real()), std::abs(x.imag())); }
inline Real pivot_size(const Real& x) { return abs(x); }
inline Real pivot_size(const Complex& x) { return max(abs(x.real()), abs(x.imag())); }

}  // namespace lu_detail

// PA = LU with partial pivoting; unit lower L and U packed in one matrix.
template <class T>
struct LuFactor {
  Mat<T> lu;
  std::vector<int> perm;  // row i of PA is row perm[i] of A
  int parity = 1;
  // First elimination step whose pivot fell below the floor, if any.
  std::optional<int> singular_at;
};

// pivot_floor is an absolute threshold; a smaller pivot marks the matrix as
// numerically singular but the factorization still completes where it can.
template <class T>
LuFactor<T> lu_factor(Mat<T> a, const real_of<T>& pivot_floor) {
  using lu_detail::pivot_size;
  const int n = static_cast<int>(a.rows());
  LuFactor<T> f;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int best = k;
    real_of<T> best_size = pivot_size(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      real_of<T> s = pivot_size(a(i, k));
      if (s > best_size) {
        best = i;
        best_size = s;
      }
    }
    if (best != k) {
      a.row(k).swap(a.row(best));
      std::swap(f.perm[k], f.perm[best]);
      f.parity = -f.parity;
    }
    if (!(best_size > pivot_floor)) {
      if (!f.singular_at) f.singular_at = k;
      if (best_size == 0) continue;
    }
    const T piv = a(k, k);
    for (int i = k + 1; i < n; ++i) {
      T m = a(i, k) / piv;
      a(i, k) = m;
      for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

template <class T>
Vec<T> lu_solve(const LuFactor<T>& f, const Vec<T>& b) {
  const int n = static_cast<int>(f.lu.rows());
  Vec<T> x(n);
  for (int i = 0; i < n; ++i) x(i) = b(f.perm[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x(i) -= f.lu(i, j) * x(j);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x(i) -= f.lu(i, j) * x(j);
    x(i) /= f.lu(i, i);
  }
  return x;
}

// Sum of logs of the pivots plus i*pi for an odd permutation; the imaginary
// part is not reduced to the principal range.
template <class T>
complex_of<real_of<T>> lu_log_det(const LuFactor<T>& f) {
  using C = complex_of<real_of<T>>;
  using std::log;
  const int n = static_cast<int>(f.lu.rows());
  const Bits p = Num<real_of<T>>::bits(f.lu(0, 0));
  C acc = lift_c<real_of<T>>(0.0, 0.0, p);
  for (int i = 0; i < n; ++i) acc += log(C(f.lu(i, i)));
  if (f.parity < 0) acc += C(lift<real_of<T>>(0.0, p), Num<real_of<T>>::pi(p));
  return acc;
}

}  // namespace pertlag
