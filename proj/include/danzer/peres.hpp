#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "danzer/geometry.hpp"
#include "danzer/lattice_forest.hpp"
#include "danzer/point_set.hpp"

namespace danzer {

enum class SequenceKind { kGolden, kSudDigital, kUserSupplied };

/// a_n = (n/2) phi mod 1 for even n, 0 for odd n.
TorusPoint golden_sequence(std::uint64_t n);

/// Torus sequence a_1, a_2, ... driving a Peres forest.
class TorusSequence {
 public:
  static TorusSequence golden();
  static TorusSequence sud_digital();
  /// values[n - 1] = a_n; indices past the end raise InvalidArgument.
  static TorusSequence user(std::vector<double> values);

  SequenceKind kind() const { return kind_; }
  double operator()(std::uint64_t n) const;

 private:
  SequenceKind kind_ = SequenceKind::kGolden;
  std::vector<double> values_;
};

/// F(a) = F1 ∪ R(F1), F1 = {(k, a_|k| + l) : k != 0, l integer}, R(x, y) = (-y, x).
class PeresForest final : public PointSource {
 public:
  explicit PeresForest(TorusSequence seq) : seq_(std::move(seq)) {}

  std::size_t dim() const override { return 2; }
  bool visit_box(const AxisBox& box, const PointVisitor& visit) const override;
  std::vector<double> hyperplane_hints() const override { return {1.0}; }
  const TorusSequence& sequence() const { return seq_; }

 private:
  TorusSequence seq_;
};

/// (F1 ∪ F2) inside the window, each point once: F1 by column, then the F2
/// points that are not already in F1.
PointSet peres_points(const TorusSequence& seq, const AxisBox& window, const EnumerateOptions& opt = {});

}  // namespace danzer
