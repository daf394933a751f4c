#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "danzer/geometry.hpp"
#include "danzer/point_set.hpp"

namespace danzer {

enum class Placement {
  /// Start and direction do not depend on the length, so segments of
  /// different lengths from one sampler are nested.
  kAnchored,
  /// Every segment lies wholly inside the region.
  kInside,
};

struct SegmentSamplerConfig {
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  double length = 1.0;
  AxisBox region = AxisBox::cube(2, -1.0, 1.0);
  bool include_adversarial = true;
  Placement placement = Placement::kInside;
  /// Coordinates of hyperplanes x_a = +-c that adversarial segments straddle.
  std::vector<double> hyperplanes;
};

/// Deterministic seeded segments plus an adversarial set of axis-parallel,
/// diagonal and hyperplane-straddling segments.
std::vector<Segment> sample_segments(const SegmentSamplerConfig& cfg);

struct ProbeOptions {
  unsigned threads = 1;
  /// Stop at the first segment whose distance exceeds epsilon.
  bool fail_fast = false;
};

struct VisibilityReport {
  double epsilon;
  double segment_length;
  double worst_min_distance;
  std::size_t witness_index;
  std::optional<Segment> witness_segment;
  std::size_t segments;
  bool pass;
};

/// Exact min over source points of the distance to s. Stops early and
/// returns the first distance found below `stop_below`.
double segment_min_distance(const PointSource& source, const Segment& s, double stop_below = -1.0);

/// Worst over the segments of the min distance to the source.
VisibilityReport visibility_probe(const PointSource& source, std::span<const Segment> segments, double epsilon,
                                  const ProbeOptions& opt = {});

struct LengthLadder {
  double min_length = 1.0;
  double max_length = 1024.0;
  double factor = 2.0;

  std::vector<double> values() const;
};

struct CurvePoint {
  double epsilon;
  /// Smallest ladder length that passes; empty when none does.
  std::optional<double> min_length;
};

struct VisibilityCurve {
  std::vector<CurvePoint> points;
  bool monotone;
  /// min over finite points of length * eps^{d-1}.
  double baseline_constant;
  bool baseline_ok;
  /// max over finite points of length * eps^power for the requested dominance power.
  std::optional<double> dominance_constant;
};

/// Smallest passing ladder length per epsilon. `cfg.length` is overridden and
/// placement is forced to anchored so lengths are nested.
VisibilityCurve empirical_visibility_curve(const PointSource& source, SegmentSamplerConfig cfg,
                                           std::span<const double> epsilons, const LengthLadder& ladder,
                                           const ProbeOptions& opt = {}, std::optional<double> dominance_power = {});

struct EmptyBox {
  double volume;
  AxisBox box;
};

/// Largest open axis-parallel rectangle inside [-1/2, 1/2]^2 avoiding the points.
EmptyBox largest_empty_rectangle_2d(const PointSet& points);

struct EmptyBoxSearch {
  EmptyBox best;
  int resolution_log2;
  bool certifying;
};

/// Heuristic search for large empty boxes (d-1 equal sides) in [-1/2, 1/2]^d
/// on the 2^-resolution_log2 grid. d = 2 delegates to the exact search.
EmptyBoxSearch empty_box_search_nd(const PointSet& points, int resolution_log2 = 4, unsigned threads = 1);

struct GrowthRow {
  double T;
  std::uint64_t count;
  double per_volume;      ///< count / T^d
  double per_volume_log;  ///< count / (T^d ln T)
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double band_volume;      ///< max / min of per_volume
  double band_volume_log;  ///< max / min of per_volume_log
  double max_per_volume;
  double max_per_volume_log;
};

GrowthReport growth_fit(const std::function<std::uint64_t(double)>& count_fn, std::span<const double> T_ladder,
                        std::size_t dim);

}  // namespace danzer
