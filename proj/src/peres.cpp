#include "danzer/peres.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "danzer/errors.hpp"
#include "danzer/sud.hpp"

namespace danzer {

TorusPoint golden_sequence(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("sequence index n must be at least 1");
  if (n % 2 == 1) return TorusPoint(0.0);
  // (n/2) phi = n/2 + (n/2)(phi - 1); the integer part drops out mod 1.
  const double x = static_cast<double>(n / 2) * (std::numbers::phi - 1.0);
  return TorusPoint(wrap_unit(x));
}

TorusSequence TorusSequence::golden() { return TorusSequence(); }

TorusSequence TorusSequence::sud_digital() {
  TorusSequence s;
  s.kind_ = SequenceKind::kSudDigital;
  return s;
}

TorusSequence TorusSequence::user(std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0.0 && v < 1.0)) throw InvalidArgument("user sequence values must lie in [0, 1)");
  }
  TorusSequence s;
  s.kind_ = SequenceKind::kUserSupplied;
  s.values_ = std::move(values);
  return s;
}

double TorusSequence::operator()(std::uint64_t n) const {
  switch (kind_) {
    case SequenceKind::kGolden:
      return golden_sequence(n).value();
    case SequenceKind::kSudDigital:
      return u_value(n).to_double();
    case SequenceKind::kUserSupplied:
      if (n < 1 || n > values_.size()) {
        throw InvalidArgument("user sequence has no term a_" + std::to_string(n));
      }
      return values_[n - 1];
  }
  return 0.0;
}

namespace {

struct IntRange {
  std::int64_t first;
  std::int64_t last;
};

IntRange integer_range(double lo, double hi) {
  return {static_cast<std::int64_t>(std::ceil(lo - kTolerance)), static_cast<std::int64_t>(std::floor(hi + kTolerance))};
}

std::uint64_t magnitude(std::int64_t k) { return static_cast<std::uint64_t>(k < 0 ? -k : k); }

// F1 points (k, a_|k| + l) in the box.
template <typename Fn>
bool visit_f1(const TorusSequence& seq, const AxisBox& box, Fn&& fn) {
  const auto cols = integer_range(box.lo()[0], box.hi()[0]);
  for (std::int64_t k = cols.first; k <= cols.last; ++k) {
    if (k == 0) continue;
    const double a = seq(magnitude(k));
    const auto rows = integer_range(box.lo()[1] - a, box.hi()[1] - a);
    for (std::int64_t l = rows.first; l <= rows.last; ++l) {
      const double p[2] = {static_cast<double>(k), a + static_cast<double>(l)};
      if (box.contains(p) && !fn(std::span<const double>(p, 2), k, l)) return false;
    }
  }
  return true;
}

// F2 points (-(a_|k| + l), k) in the box.
template <typename Fn>
bool visit_f2(const TorusSequence& seq, const AxisBox& box, Fn&& fn) {
  const auto rows = integer_range(box.lo()[1], box.hi()[1]);
  for (std::int64_t k = rows.first; k <= rows.last; ++k) {
    if (k == 0) continue;
    const double a = seq(magnitude(k));
    const auto cols = integer_range(-box.hi()[0] - a, -box.lo()[0] - a);
    for (std::int64_t l = cols.first; l <= cols.last; ++l) {
      const double p[2] = {-(a + static_cast<double>(l)), static_cast<double>(k)};
      if (box.contains(p) && !fn(std::span<const double>(p, 2), k, l)) return false;
    }
  }
  return true;
}

void check_planar(const AxisBox& box) {
  if (box.dim() != 2) throw InvalidArgument("Peres forests are planar");
}

}  // namespace

bool PeresForest::visit_box(const AxisBox& box, const PointVisitor& visit) const {
  check_planar(box);
  auto fwd = [&](std::span<const double> p, std::int64_t, std::int64_t) { return visit(p); };
  return visit_f1(seq_, box, fwd) && visit_f2(seq_, box, fwd);
}

PointSet peres_points(const TorusSequence& seq, const AxisBox& window, const EnumerateOptions& opt) {
  check_planar(window);
  const double w = std::floor(window.extent(0)) + 2.0;
  const double h = std::floor(window.extent(1)) + 2.0;
  if (2.0 * w * h > static_cast<double>(opt.budget)) {
    throw BudgetExceeded("peres-forest: window needs about " + std::to_string(static_cast<std::uint64_t>(2.0 * w * h)) +
                         " points, over the budget of " + std::to_string(opt.budget));
  }
  PointSet out(2);
  visit_f1(seq, window, [&](std::span<const double> p, std::int64_t, std::int64_t) {
    out.push_back(p);
    return true;
  });
  visit_f2(seq, window, [&](std::span<const double> p, std::int64_t k, std::int64_t l) {
    // Already in F1 iff x = -l is a nonzero integer column whose offset is 0.
    const bool in_f1 = seq(magnitude(k)) == 0.0 && l != 0 && seq(magnitude(l)) == 0.0;
    if (!in_f1) out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace danzer
