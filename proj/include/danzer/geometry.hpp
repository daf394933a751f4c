#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace danzer {

/// Predicate tolerance shared by every floating-point hit test.
inline constexpr double kTolerance = 1e-9;

/// A point of R^d with d >= 2 and finite coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Directed segment between two distinct points of the same dimension.
class Segment {
 public:
  Segment(Point a, Point b);

  const Point& a() const { return a_; }
  const Point& b() const { return b_; }
  std::size_t dim() const { return a_.dim(); }
  double length() const { return length_; }

 private:
  Point a_;
  Point b_;
  double length_;
};

/// Closed axis-parallel box prod [lo_i, hi_i] with lo_i < hi_i.
class AxisBox {
 public:
  AxisBox(Point lo, Point hi);
  /// The cube [lo, hi]^d.
  static AxisBox cube(std::size_t dim, double lo, double hi);

  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  std::size_t dim() const { return lo_.dim(); }
  double extent(std::size_t i) const { return hi_[i] - lo_[i]; }
  double volume() const;
  /// Largest |coordinate| reached by the box.
  double max_abs_coordinate() const;

  /// Closed membership; boundary points are inside, up to `tol`.
  bool contains(std::span<const double> p, double tol = kTolerance) const;
  /// The box grown by `margin` on every side.
  AxisBox expanded(double margin) const;

 private:
  Point lo_;
  Point hi_;
};

/// Unit torus value in [0, 1).
class TorusPoint {
 public:
  explicit TorusPoint(double value);
  double value() const { return value_; }

 private:
  double value_;
};

/// Euclidean distance from p to the closed segment s.
double dist_point_segment(std::span<const double> p, const Segment& s);
inline double dist_point_segment(const Point& p, const Segment& s) {
  return dist_point_segment(p.coords(), s);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Distance from x to the nearest integer.
double torus_dist(double x);

/// Reduces x into [0, 1).
double wrap_unit(double x);

/// Segment with the quantities needed by repeated distance queries cached.
class SegmentQuery {
 public:
  explicit SegmentQuery(const Segment& s);
  double distance(std::span<const double> p) const;
  double squared_distance(std::span<const double> p) const;

 private:
  std::vector<double> a_;
  std::vector<double> delta_;
  double len2_;
};

}  // namespace danzer
