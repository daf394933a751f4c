#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "danzer/geometry.hpp"
#include "danzer/point_set.hpp"

namespace danzer {

/// Which nonzero multiples of the coarse spacing a layer uses.
enum class IndexSet { kNonzero, kOdd };

/// Spacing base * 2^exponent. Grid values are ldexp(idx * base, exponent),
/// so a point shared by two dyadically related grids yields identical doubles.
struct GridStep {
  double base = 1.0;
  int exponent = 0;

  double value() const;
  double at(std::int64_t idx) const;
};

/// One translated lattice: the coarse coordinate sits on `swap_axis`
/// (0-based), every other coordinate runs over the fine grid.
struct LatticeLayer {
  int j = 1;
  GridStep coarse;
  GridStep fine;
  IndexSet coarse_index_set = IndexSet::kNonzero;
  std::size_t swap_axis = 0;
  double epsilon = 0.0;

  double coarse_spacing() const { return coarse.value(); }
  double fine_spacing() const { return fine.value(); }
  bool allows(std::int64_t k) const;
  /// Exact membership of p in this layer's grid.
  bool contains(std::span<const double> p) const;
};

/// (e_j, V(e_j)) pair of a visibility schedule.
struct ScheduleEntry {
  double epsilon;
  double visibility;
};

/// Countable union of lattice layers, stored up to a finite prefix in
/// layer-major order (j, then swap axis).
class ForestSpec {
 public:
  ForestSpec(std::size_t dim, std::vector<LatticeLayer> layers, std::vector<ScheduleEntry> schedule,
             double tail_bound, std::string name);

  std::size_t dim() const { return dim_; }
  const std::vector<LatticeLayer>& layers() const { return layers_; }
  const std::vector<ScheduleEntry>& schedule() const { return schedule_; }
  /// Certified bound on sum_{j > J} e_j^{-(d-1)} / V(e_j) beyond the stored schedule.
  double tail_bound() const { return tail_bound_; }
  const std::string& name() const { return name_; }

  /// W(eps) = V(e_i) for the unique i with e_i <= eps < e_{i-1}.
  double visibility(double eps) const;
  /// Index i (1-based) selected by visibility().
  int schedule_index(double eps) const;
  /// Segment length 2 sqrt(d) V(e_j) at which hitting within e_j is guaranteed.
  double guaranteed_length(int j) const;
  /// Largest j with V(e_j) <= T, or 0.
  int density_index(double T) const;

 private:
  std::size_t dim_;
  std::vector<LatticeLayer> layers_;
  std::vector<ScheduleEntry> schedule_;
  double tail_bound_;
  std::string name_;
};

/// Smallest odd integer strictly larger than x.
std::int64_t odd_ceiling(double x);

/// Generic dense-forest builder: S_j = {(k V(e_j), l e_j / sqrt(d), ...) : k != 0}
/// replicated over the d axis swaps. The caller certifies the series tail.
ForestSpec theorem_forest_spec(std::size_t dim, std::vector<ScheduleEntry> schedule, double tail_bound);

/// Explicit odd-ceiling forest with e_j = 2^-j and layer spacing
/// ceil_o(j ln(j)^(1+eta)) 2^(j(d-1)), fine step 2^-j, odd k.
ForestSpec corollary_forest_spec(std::size_t dim, double eta);

struct EnumerateOptions {
  std::uint64_t budget = 100'000'000;
};

/// Points of the forest inside the closed window, each once, layer-major then
/// lexicographic. Throws BudgetExceeded naming the offending layer.
PointSet enumerate_points(const ForestSpec& spec, const AxisBox& window, const EnumerateOptions& opt = {});

/// Streaming form of enumerate_points.
void for_each_point(const ForestSpec& spec, const AxisBox& window, const EnumerateOptions& opt,
                    const PointVisitor& visit);

/// Exact number of forest points with Euclidean norm <= T.
std::uint64_t count_in_ball(const ForestSpec& spec, double T, const EnumerateOptions& opt = {});

/// 2^d d^(d/2) sum_{j <= j_max} e_j^{-(d-1)} / V(e_j).
double series_density_bound(const ForestSpec& spec, int j_max);

/// Lazy point source over a forest; used by the probes.
class LatticeForest final : public PointSource {
 public:
  explicit LatticeForest(ForestSpec spec);

  std::size_t dim() const override { return spec_.dim(); }
  bool visit_box(const AxisBox& box, const PointVisitor& visit) const override;
  double spacing_hint() const override { return spacing_; }
  std::vector<double> hyperplane_hints() const override;
  const ForestSpec& spec() const { return spec_; }

 private:
  ForestSpec spec_;
  double spacing_;
};

}  // namespace danzer
