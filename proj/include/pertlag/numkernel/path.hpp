#pragma once

#include <stdexcept>

#include "pertlag/numkernel/scalar.hpp"

namespace pertlag {

enum class SegmentKind { Line, Arc };

// One oriented piece of an integration path, parametrised by u in [0, 1].
// Points are evaluated from the nearer endpoint so that nodes clustered at
// either end keep full relative accuracy.
template <class R>
class PathSegment {
 public:
  using C = complex_of<R>;

  static PathSegment line(C from, C to) {
    if (from == to) throw std::invalid_argument("line segment needs distinct endpoints");
    PathSegment s;
    s.kind_ = SegmentKind::Line;
    s.a_ = std::move(from);
    s.b_ = std::move(to);
    return s;
  }

  // Arc of the circle |z - center| = radius from angle theta0 to theta1.
  static PathSegment arc(C center, R radius, R theta0, R theta1) {
    if (!(radius > 0)) throw std::invalid_argument("arc needs a positive radius");
    if (theta0 == theta1) throw std::invalid_argument("arc needs a nonempty angular range");
    PathSegment s;
    s.kind_ = SegmentKind::Arc;
    s.center_ = std::move(center);
    s.radius_ = std::move(radius);
    s.theta0_ = std::move(theta0);
    s.theta1_ = std::move(theta1);
    s.a_ = s.at_angle(s.theta0_);
    s.b_ = s.at_angle(s.theta1_);
    return s;
  }

  SegmentKind kind() const { return kind_; }
  bool reversed() const { return reversed_; }
  const C& center() const { return center_; }
  const R& radius() const { return radius_; }
  const R& theta0() const { return theta0_; }
  const R& theta1() const { return theta1_; }

  // Same geometry, opposite direction. Integrals over it use the same nodes
  // with negated weights.
  PathSegment reverse() const {
    PathSegment s = *this;
    s.reversed_ = !reversed_;
    return s;
  }

  C start() const { return reversed_ ? b_ : a_; }
  C end() const { return reversed_ ? a_ : b_; }

  // Point and derivative dz/du of the forward parametrisation; u and
  // one_minus_u are passed separately so both ends stay accurate.
  void eval(const R& u, const R& one_minus_u, C& z, C& dz) const {
    if (kind_ == SegmentKind::Line) {
      dz = b_ - a_;
      z = (u < 0.5) ? C(a_ + dz * u) : C(b_ - dz * one_minus_u);
      return;
    }
    R span = theta1_ - theta0_;
    R theta = (u < 0.5) ? R(theta0_ + span * u) : R(theta1_ - span * one_minus_u);
    C e = unit(theta);
    z = center_ + e * radius_;
    dz = C(-imag(e), real(e)) * (radius_ * span);
  }

  R length() const {
    using std::abs;
    if (kind_ == SegmentKind::Line) return abs(b_ - a_);
    return abs(theta1_ - theta0_) * radius_;
  }

 private:
  static C unit(const R& theta) {
    using std::cos;
    using std::sin;
    return C(cos(theta), sin(theta));
  }
  C at_angle(const R& theta) const { return center_ + unit(theta) * radius_; }

  SegmentKind kind_ = SegmentKind::Line;
  bool reversed_ = false;
  C a_, b_, center_;
  R radius_{}, theta0_{}, theta1_{};
};

}  // namespace pertlag
