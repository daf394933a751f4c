#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "danzer/geometry.hpp"

namespace danzer {

/// Finite point cloud stored as one flat coordinate buffer.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> flat);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& flat() const { return coords_; }

  void push_back(std::span<const double> p);
  void pop_back() { coords_.resize(coords_.size() - dim_); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  /// Removes points that fall inside the closed box.
  PointSet without_box(const AxisBox& box) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Point-set CSV: "# dim=<d>" header, one point per line, 12 significant digits.
void write_point_csv(std::ostream& out, const PointSet& points);
std::string format_coordinate(double x);

/// Accumulates points, dropping exact coordinate duplicates; insertion order is kept.
class DedupPointSetBuilder {
 public:
  explicit DedupPointSetBuilder(std::size_t dim);
  ~DedupPointSetBuilder();
  DedupPointSetBuilder(const DedupPointSetBuilder&) = delete;
  DedupPointSetBuilder& operator=(const DedupPointSetBuilder&) = delete;

  /// Returns true when the point was new.
  bool insert(std::span<const double> p);
  std::size_t size() const { return points_.size(); }
  PointSet release();

 private:
  struct Hash {
    const DedupPointSetBuilder* owner;
    std::size_t operator()(std::size_t idx) const;
  };
  struct Equal {
    const DedupPointSetBuilder* owner;
    bool operator()(std::size_t a, std::size_t b) const;
  };
  std::span<const double> at(std::size_t idx) const;

  PointSet points_;
  std::unordered_set<std::size_t, Hash, Equal> index_;
};

/// Visitor over points; return false to stop the traversal.
using PointVisitor = std::function<bool(std::span<const double>)>;

/// Anything that can list its points inside a bounded box. Infinite
/// constructions implement this lazily.
class PointSource {
 public:
  virtual ~PointSource() = default;
  virtual std::size_t dim() const = 0;
  /// Visits points inside the closed box (tolerance kTolerance). A point may be
  /// visited more than once. Returns false if the visitor stopped early.
  virtual bool visit_box(const AxisBox& box, const PointVisitor& visit) const = 0;
  /// Typical nearest-neighbour spacing; used to size probe pieces.
  virtual double spacing_hint() const { return 1.0; }
  /// Coordinates of distinguished hyperplanes (by absolute value) the
  /// segment sampler should straddle.
  virtual std::vector<double> hyperplane_hints() const { return {}; }
};

/// Bucket-grid index over a finite point set.
class FinitePointSource final : public PointSource {
 public:
  explicit FinitePointSource(PointSet points);

  std::size_t dim() const override { return points_.dim(); }
  bool visit_box(const AxisBox& box, const PointVisitor& visit) const override;
  double spacing_hint() const override { return spacing_; }
  const PointSet& points() const { return points_; }

 private:
  PointSet points_;
  std::vector<double> lo_;
  std::vector<double> cell_;
  std::vector<std::size_t> cells_per_axis_;
  std::vector<std::size_t> bucket_start_;
  std::vector<std::size_t> order_;
  double spacing_ = 1.0;
};

}  // namespace danzer
