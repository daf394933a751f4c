#include "danzer/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "danzer/errors.hpp"

namespace danzer {

namespace {

void check_coords(const std::vector<double>& c) {
  if (c.size() < 2) throw InvalidArgument("point dimension must be at least 2");
  for (double x : c) {
    if (!std::isfinite(x)) throw InvalidArgument("point coordinate is not finite");
  }
}

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) { check_coords(coords_); }

Point::Point(std::initializer_list<double> coords) : coords_(coords) { check_coords(coords_); }

Point::Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {
  check_coords(coords_);
}

Segment::Segment(Point a, Point b) : a_(std::move(a)), b_(std::move(b)) {
  check_same_dim(a_.dim(), b_.dim());
  length_ = euclidean_distance(a_.coords(), b_.coords());
  if (!(length_ > 0.0)) throw InvalidArgument("segment endpoints coincide");
}

AxisBox::AxisBox(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  check_same_dim(lo_.dim(), hi_.dim());
  for (std::size_t i = 0; i < lo_.dim(); ++i) {
    if (!(lo_[i] < hi_[i])) throw InvalidArgument("box requires lo < hi on every axis");
  }
}

AxisBox AxisBox::cube(std::size_t dim, double lo, double hi) {
  return AxisBox(Point(std::vector<double>(dim, lo)), Point(std::vector<double>(dim, hi)));
}

double AxisBox::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= extent(i);
  return v;
}

double AxisBox::max_abs_coordinate() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) m = std::max({m, std::fabs(lo_[i]), std::fabs(hi_[i])});
  return m;
}

bool AxisBox::contains(std::span<const double> p, double tol) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (p[i] < lo_[i] - tol || p[i] > hi_[i] + tol) return false;
  }
  return true;
}

AxisBox AxisBox::expanded(double margin) const {
  std::vector<double> lo(lo_.coords().begin(), lo_.coords().end());
  std::vector<double> hi(hi_.coords().begin(), hi_.coords().end());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= margin;
    hi[i] += margin;
  }
  return AxisBox(Point(std::move(lo)), Point(std::move(hi)));
}

TorusPoint::TorusPoint(double value) : value_(value) {
  if (!(value >= 0.0 && value < 1.0)) throw InvalidArgument("torus point must lie in [0, 1)");
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

SegmentQuery::SegmentQuery(const Segment& s)
    : a_(s.a().coords().begin(), s.a().coords().end()), delta_(s.dim()), len2_(0.0) {
  for (std::size_t i = 0; i < delta_.size(); ++i) {
    delta_[i] = s.b()[i] - s.a()[i];
    len2_ += delta_[i] * delta_[i];
  }
}

double SegmentQuery::squared_distance(std::span<const double> p) const {
  const std::size_t d = a_.size();
  double dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) dot += (p[i] - a_[i]) * delta_[i];
  const double t = std::clamp(dot / len2_, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double r = p[i] - (a_[i] + t * delta_[i]);
    s += r * r;
  }
  return s;
}

double SegmentQuery::distance(std::span<const double> p) const {
  return std::sqrt(squared_distance(p));
}

double dist_point_segment(std::span<const double> p, const Segment& s) {
  check_same_dim(p.size(), s.dim());
  return SegmentQuery(s).distance(p);
}

double torus_dist(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

double wrap_unit(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

}  // namespace danzer
