#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "driftbound/error.hpp"

namespace driftbound {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class DomainKind { Interval, Box, Ball };

template <typename Scalar>
struct RadialExtents {
  Scalar r_star;  // min distance from the point to the closed domain
  Scalar R_star;  // max distance from the point to the closed domain
};

/// Bounded open region U: an interval, an axis-aligned box or a ball.
///
/// Intervals are boxes of dimension one; they keep their own kind so configs
/// and reports can round-trip what the user wrote.
template <typename Scalar>
class BasicDomain {
 public:
  using Point = VectorX<Scalar>;

  static BasicDomain interval(Scalar lower, Scalar upper) {
    Point lo(1), hi(1);
    lo << lower;
    hi << upper;
    return BasicDomain(DomainKind::Interval, std::move(lo), std::move(hi), Point(), Scalar(0));
  }

  static BasicDomain box(Point lower, Point upper) {
    if (lower.size() != upper.size() || lower.size() == 0) {
      throw Error(ErrorCode::BadGeometry, "box bounds must be non-empty and of equal dimension");
    }
    return BasicDomain(DomainKind::Box, std::move(lower), std::move(upper), Point(), Scalar(0));
  }

  static BasicDomain ball(Point center, Scalar radius) {
    if (center.size() == 0) throw Error(ErrorCode::BadGeometry, "ball center must be non-empty");
    return BasicDomain(DomainKind::Ball, Point(), Point(), std::move(center), radius);
  }

  [[nodiscard]] DomainKind kind() const noexcept { return kind_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept {
    return kind_ == DomainKind::Ball ? center_.size() : lower_.size();
  }
  [[nodiscard]] const Point& lower() const noexcept { return lower_; }
  [[nodiscard]] const Point& upper() const noexcept { return upper_; }
  [[nodiscard]] const Point& center() const noexcept { return center_; }
  [[nodiscard]] Scalar radius() const noexcept { return radius_; }
  [[nodiscard]] bool is_tensor() const noexcept { return kind_ != DomainKind::Ball; }

  [[nodiscard]] BasicDomain translated(const Point& shift) const {
    check_dimension(shift);
    BasicDomain out = *this;
    if (kind_ == DomainKind::Ball) {
      out.center_ += shift;
    } else {
      out.lower_ += shift;
      out.upper_ += shift;
    }
    return out;
  }

  [[nodiscard]] bool closure_contains(const Point& y) const {
    check_dimension(y);
    if (kind_ == DomainKind::Ball) return (y - center_).norm() <= radius_;
    return ((y.array() >= lower_.array()) && (y.array() <= upper_.array())).all();
  }

  void check_dimension(const Point& y) const {
    if (y.size() != dimension()) {
      throw Error(ErrorCode::BadGeometry, "point dimension " + std::to_string(y.size()) +
                                              " does not match domain dimension " +
                                              std::to_string(dimension()));
    }
  }

 private:
  BasicDomain(DomainKind kind, Point lower, Point upper, Point center, Scalar radius)
      : kind_(kind),
        lower_(std::move(lower)),
        upper_(std::move(upper)),
        center_(std::move(center)),
        radius_(radius) {
    if (kind_ == DomainKind::Ball) {
      if (!(radius_ > Scalar(0))) throw Error(ErrorCode::BadGeometry, "ball radius must be positive");
    } else if (!(upper_.array() > lower_.array()).all()) {
      throw Error(ErrorCode::BadGeometry, "every upper bound must exceed its lower bound");
    }
  }

  DomainKind kind_;
  Point lower_;
  Point upper_;
  Point center_;
  Scalar radius_;
};

using Domain = BasicDomain<double>;
using Point = Domain::Point;

template <typename Scalar>
[[nodiscard]] Scalar diameter(const BasicDomain<Scalar>& domain) {
  if (domain.kind() == DomainKind::Ball) return Scalar(2) * domain.radius();
  return (domain.upper() - domain.lower()).norm();
}

/// Canonical pair of closure points at distance diam(U): opposite corners of
/// the main diagonal for boxes, the endpoints of the first-axis diameter for
/// balls.
template <typename Scalar>
[[nodiscard]] std::pair<VectorX<Scalar>, VectorX<Scalar>> diameter_pair(
    const BasicDomain<Scalar>& domain) {
  if (domain.kind() == DomainKind::Ball) {
    VectorX<Scalar> offset = VectorX<Scalar>::Zero(domain.dimension());
    offset(0) = domain.radius();
    return {domain.center() - offset, domain.center() + offset};
  }
  return {domain.lower(), domain.upper()};
}

template <typename Scalar>
[[nodiscard]] RadialExtents<Scalar> radial_extents(const BasicDomain<Scalar>& domain,
                                                   const VectorX<Scalar>& y) {
  if (domain.closure_contains(y)) {
    throw Error(ErrorCode::InteriorPoint, "barrier center lies in the closed domain");
  }
  if (domain.kind() == DomainKind::Ball) {
    const Scalar dist = (y - domain.center()).norm();
    return {dist - domain.radius(), dist + domain.radius()};
  }
  const VectorX<Scalar> nearest = y.cwiseMax(domain.lower()).cwiseMin(domain.upper());
  const VectorX<Scalar> to_lower = (y - domain.lower()).cwiseAbs();
  const VectorX<Scalar> to_upper = (y - domain.upper()).cwiseAbs();
  return {(y - nearest).norm(), to_lower.cwiseMax(to_upper).norm()};
}

/// Point y outside the closure with r_*(y) = R - d and R_*(y) = R, placed on
/// the line through the canonical diameter pair beyond its second end.
template <typename Scalar>
[[nodiscard]] VectorX<Scalar> barrier_center(const BasicDomain<Scalar>& domain, Scalar R) {
  const Scalar d = diameter(domain);
  if (!(R > d)) {
    throw Error(ErrorCode::RadiusTooSmall,
                "barrier radius R must exceed the domain diameter d (R > d)");
  }
  const auto [xi1, xi2] = diameter_pair(domain);
  return xi1 + (R / d) * (xi2 - xi1);
}

}  // namespace driftbound
