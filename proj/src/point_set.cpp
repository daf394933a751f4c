#include "danzer/point_set.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "danzer/errors.hpp"

namespace danzer {

PointSet::PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), coords_(std::move(flat)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    throw InvalidArgument("flat coordinate buffer is not a multiple of the dimension");
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw InvalidArgument("point dimension does not match the set");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointSet PointSet::without_box(const AxisBox& box) const {
  PointSet out(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (!box.contains((*this)[i], 0.0)) out.push_back((*this)[i]);
  }
  return out;
}

std::string format_coordinate(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_point_csv(std::ostream& out, const PointSet& points) {
  out << "# dim=" << points.dim() << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << format_coordinate(p[j]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

DedupPointSetBuilder::DedupPointSetBuilder(std::size_t dim)
    : points_(dim), index_(16, Hash{this}, Equal{this}) {}

DedupPointSetBuilder::~DedupPointSetBuilder() = default;

std::span<const double> DedupPointSetBuilder::at(std::size_t idx) const { return points_[idx]; }

std::size_t DedupPointSetBuilder::Hash::operator()(std::size_t idx) const {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (double x : owner->at(idx)) {
    if (x == 0.0) x = 0.0;
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    h ^= bits + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

bool DedupPointSetBuilder::Equal::operator()(std::size_t a, std::size_t b) const {
  const auto pa = owner->at(a);
  const auto pb = owner->at(b);
  return std::equal(pa.begin(), pa.end(), pb.begin());
}

bool DedupPointSetBuilder::insert(std::span<const double> p) {
  const std::size_t idx = points_.size();
  points_.push_back(p);
  if (index_.insert(idx).second) return true;
  points_.pop_back();
  return false;
}

PointSet DedupPointSetBuilder::release() {
  index_.clear();
  PointSet out = std::move(points_);
  points_ = PointSet(out.dim());
  return out;
}

// ---------------------------------------------------------------------------

FinitePointSource::FinitePointSource(PointSet points) : points_(std::move(points)) {
  const std::size_t d = points_.dim();
  const std::size_t n = points_.size();
  lo_.assign(d, 0.0);
  cell_.assign(d, 1.0);
  cells_per_axis_.assign(d, 1);
  if (n == 0) {
    bucket_start_ = {0, 0};
    return;
  }
  std::vector<double> hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    lo_[a] = hi[a] = points_[0][a];
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      lo_[a] = std::min(lo_[a], points_[i][a]);
      hi[a] = std::max(hi[a], points_[i][a]);
    }
  }
  const double per_axis = std::max(1.0, std::floor(std::pow(static_cast<double>(n), 1.0 / d)));
  double volume = 1.0;
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const double ext = hi[a] - lo_[a];
    cells_per_axis_[a] = ext > 0.0 ? static_cast<std::size_t>(per_axis) : 1;
    cell_[a] = ext > 0.0 ? ext / static_cast<double>(cells_per_axis_[a]) : 1.0;
    if (ext > 0.0) volume *= ext;
    total *= cells_per_axis_[a];
  }
  spacing_ = std::pow(volume / static_cast<double>(n), 1.0 / d);
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) spacing_ = 1.0;

  auto cell_of = [&](std::span<const double> p) {
    std::size_t idx = 0;
    for (std::size_t a = d; a-- > 0;) {
      auto c = static_cast<std::size_t>(std::max(0.0, (p[a] - lo_[a]) / cell_[a]));
      c = std::min(c, cells_per_axis_[a] - 1);
      idx = idx * cells_per_axis_[a] + c;
    }
    return idx;
  };
  std::vector<std::size_t> cell_index(n);
  bucket_start_.assign(total + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cell_index[i] = cell_of(points_[i]);
    ++bucket_start_[cell_index[i] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) bucket_start_[c + 1] += bucket_start_[c];
  order_.resize(n);
  std::vector<std::size_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) order_[fill[cell_index[i]]++] = i;
}

bool FinitePointSource::visit_box(const AxisBox& box, const PointVisitor& visit) const {
  const std::size_t d = points_.dim();
  if (box.dim() != d) throw InvalidArgument("box dimension does not match the point set");
  if (points_.empty()) return true;
  std::vector<std::size_t> first(d), last(d);
  std::size_t span_cells = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const double lo = (box.lo()[a] - kTolerance - lo_[a]) / cell_[a];
    const double hi = (box.hi()[a] + kTolerance - lo_[a]) / cell_[a];
    const auto top = static_cast<double>(cells_per_axis_[a] - 1);
    if (hi < 0.0 || lo > top + 1.0) return true;
    first[a] = static_cast<std::size_t>(std::clamp(std::floor(lo), 0.0, top));
    last[a] = static_cast<std::size_t>(std::clamp(std::floor(hi), 0.0, top));
    span_cells *= last[a] - first[a] + 1;
  }
  if (span_cells >= points_.size()) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (box.contains(points_[i]) && !visit(points_[i])) return false;
    }
    return true;
  }
  std::vector<std::size_t> cur = first;
  while (true) {
    std::size_t idx = 0;
    for (std::size_t a = d; a-- > 0;) idx = idx * cells_per_axis_[a] + cur[a];
    for (std::size_t k = bucket_start_[idx]; k < bucket_start_[idx + 1]; ++k) {
      const auto p = points_[order_[k]];
      if (box.contains(p) && !visit(p)) return false;
    }
    std::size_t a = 0;
    while (a < d && cur[a] == last[a]) {
      cur[a] = first[a];
      ++a;
    }
    if (a == d) break;
    ++cur[a];
  }
  return true;
}

}  // namespace danzer
