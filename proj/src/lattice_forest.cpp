#include "danzer/lattice_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "danzer/errors.hpp"

namespace danzer {

double GridStep::value() const { return std::ldexp(base, exponent); }

double GridStep::at(std::int64_t idx) const {
  return std::ldexp(static_cast<double>(idx) * base, exponent);
}

bool LatticeLayer::allows(std::int64_t k) const {
  if (k == 0) return false;
  return coarse_index_set == IndexSet::kNonzero || (k % 2 != 0);
}

namespace {

constexpr double kMaxIndex = 4.0e18;

// Index n with step.at(n) == x exactly, if any.
bool grid_index(const GridStep& step, double x, std::int64_t& n) {
  const double q = x / step.value();
  if (!(std::fabs(q) < kMaxIndex)) return false;
  n = std::llround(q);
  return step.at(n) == x;
}

}  // namespace

bool LatticeLayer::contains(std::span<const double> p) const {
  std::int64_t n = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (a == swap_axis) {
      if (!grid_index(coarse, p[a], n) || !allows(n)) return false;
    } else if (!grid_index(fine, p[a], n)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

ForestSpec::ForestSpec(std::size_t dim, std::vector<LatticeLayer> layers, std::vector<ScheduleEntry> schedule,
                       double tail_bound, std::string name)
    : dim_(dim),
      layers_(std::move(layers)),
      schedule_(std::move(schedule)),
      tail_bound_(tail_bound),
      name_(std::move(name)) {
  if (dim_ < 2) throw InvalidArgument("forest dimension must be at least 2");
  if (layers_.empty()) throw InvalidArgument("forest needs at least one layer");
  double prev_coarse = 0.0;
  for (const auto& layer : layers_) {
    if (layer.swap_axis >= dim_) throw InvalidArgument("layer swap axis outside the dimension");
    const double c = layer.coarse_spacing();
    const double f = layer.fine_spacing();
    if (!(f > 0.0) || !(c > f)) throw InvalidArgument("layer requires coarse_spacing > fine_spacing > 0");
    if (c < prev_coarse) throw InvalidArgument("layers must be ordered by non-decreasing coarse spacing");
    prev_coarse = c;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < schedule_.size(); ++j) {
    const auto& e = schedule_[j];
    if (!(e.epsilon > 0.0 && e.epsilon < 1.0)) throw InvalidArgument("schedule epsilon must lie in (0, 1)");
    if (!(e.visibility > 0.0)) throw InvalidArgument("schedule visibility must be positive");
    if (j > 0 && !(e.epsilon < schedule_[j - 1].epsilon)) {
      throw InvalidArgument("schedule epsilons must be strictly decreasing");
    }
    if (j > 0 && !(e.visibility > schedule_[j - 1].visibility)) {
      throw InvalidArgument("schedule visibilities must be strictly increasing");
    }
    sum += std::pow(e.epsilon, -static_cast<double>(dim_ - 1)) / e.visibility;
  }
  if (!std::isfinite(sum)) throw InvalidArgument("density series prefix is not finite");
  if (!schedule_.empty() && !(tail_bound_ >= 0.0 && std::isfinite(tail_bound_))) {
    throw InvalidArgument("a finite non-negative tail bound certificate is required");
  }
}

int ForestSpec::schedule_index(double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    if (schedule_[i].epsilon <= eps) return static_cast<int>(i) + 1;
  }
  throw InvalidArgument("epsilon is below the stored visibility schedule");
}

double ForestSpec::visibility(double eps) const {
  return schedule_[static_cast<std::size_t>(schedule_index(eps)) - 1].visibility;
}

double ForestSpec::guaranteed_length(int j) const {
  if (j < 1 || static_cast<std::size_t>(j) > schedule_.size()) throw InvalidArgument("schedule index out of range");
  return 2.0 * std::sqrt(static_cast<double>(dim_)) * schedule_[static_cast<std::size_t>(j) - 1].visibility;
}

int ForestSpec::density_index(double T) const {
  int j = 0;
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    if (schedule_[i].visibility <= T) j = static_cast<int>(i) + 1;
  }
  return j;
}

std::int64_t odd_ceiling(double x) {
  auto n = static_cast<std::int64_t>(std::floor(x)) + 1;
  if (n % 2 == 0) ++n;
  return n;
}

ForestSpec theorem_forest_spec(std::size_t dim, std::vector<ScheduleEntry> schedule, double tail_bound) {
  if (dim < 2) throw InvalidArgument("forest dimension must be at least 2");
  if (schedule.empty()) throw InvalidArgument("schedule must not be empty");
  const double root_d = std::sqrt(static_cast<double>(dim));
  std::vector<LatticeLayer> layers;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    for (std::size_t axis = 0; axis < dim; ++axis) {
      LatticeLayer layer;
      layer.j = static_cast<int>(j) + 1;
      layer.coarse = {schedule[j].visibility, 0};
      layer.fine = {schedule[j].epsilon / root_d, 0};
      layer.coarse_index_set = IndexSet::kNonzero;
      layer.swap_axis = axis;
      layer.epsilon = schedule[j].epsilon;
      layers.push_back(layer);
    }
  }
  return ForestSpec(dim, std::move(layers), std::move(schedule), tail_bound, "theorem");
}

ForestSpec corollary_forest_spec(std::size_t dim, double eta) {
  if (dim < 2) throw InvalidArgument("forest dimension must be at least 2");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be positive");
  const int d1 = static_cast<int>(dim) - 1;
  // Keep coarse spacings well inside the exactly representable integers.
  const int j_max = std::max(2, 52 / d1);
  std::vector<LatticeLayer> layers;
  std::vector<ScheduleEntry> schedule;
  for (int j = 1; j <= j_max; ++j) {
    const double arg = j * std::pow(std::log(static_cast<double>(j)), 1.0 + eta);
    const std::int64_t odd = odd_ceiling(arg);
    const GridStep coarse{static_cast<double>(odd), j * d1};
    const GridStep fine{1.0, -j};
    schedule.push_back({std::ldexp(1.0, -j), coarse.value()});
    for (std::size_t axis = 0; axis < dim; ++axis) {
      layers.push_back({j, coarse, fine, IndexSet::kOdd, axis, std::ldexp(1.0, -j)});
    }
  }
  // sum_{j > J} 1/ceil_o(j ln(j)^(1+eta)) <= int_J^inf dx / (x ln(x)^(1+eta)) = 1 / (eta ln(J)^eta)
  const double tail = 1.0 / (eta * std::pow(std::log(static_cast<double>(j_max)), eta));
  std::ostringstream name;
  name << "corollary(d=" << dim << ",eta=" << eta << ")";
  return ForestSpec(dim, std::move(layers), std::move(schedule), tail, name.str());
}

// ---------------------------------------------------------------------------

namespace {

struct AxisValues {
  std::vector<double> values;
};

// Per-axis candidate coordinates of `layer` inside `box`; false when empty.
// `count` receives the number of candidate points (saturating, as a double).
bool layer_axes(const LatticeLayer& layer, const AxisBox& box, std::vector<AxisValues>& axes, double& count,
                bool materialize) {
  const std::size_t d = box.dim();
  axes.resize(d);
  count = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    const GridStep& step = a == layer.swap_axis ? layer.coarse : layer.fine;
    const double s = step.value();
    const double lo = std::ceil((box.lo()[a] - kTolerance) / s);
    const double hi = std::floor((box.hi()[a] + kTolerance) / s);
    if (hi < lo) return false;
    if (std::fabs(lo) > kMaxIndex || std::fabs(hi) > kMaxIndex) {
      count = std::numeric_limits<double>::infinity();
      return true;
    }
    const auto first = static_cast<std::int64_t>(lo);
    const auto last = static_cast<std::int64_t>(hi);
    double n = static_cast<double>(last - first + 1);
    if (a == layer.swap_axis) {
      if (layer.coarse_index_set == IndexSet::kOdd) {
        const std::int64_t f = first % 2 == 0 ? first + 1 : first;
        const std::int64_t l = last % 2 == 0 ? last - 1 : last;
        n = l >= f ? static_cast<double>((l - f) / 2 + 1) : 0.0;
      } else if (first <= 0 && last >= 0) {
        n -= 1.0;
      }
    }
    if (n <= 0.0) return false;
    count *= n;
    if (!materialize) continue;
    auto& vals = axes[a].values;
    vals.clear();
    for (std::int64_t i = first; i <= last; ++i) {
      if (a == layer.swap_axis && !layer.allows(i)) continue;
      const double x = step.at(i);
      if (x >= box.lo()[a] - kTolerance && x <= box.hi()[a] + kTolerance) vals.push_back(x);
    }
    if (vals.empty()) return false;
  }
  return true;
}

// Lexicographic odometer over the per-axis value lists.
template <typename Fn>
bool for_each_combination(const std::vector<AxisValues>& axes, std::vector<double>& p, Fn&& fn) {
  const std::size_t d = axes.size();
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t a = 0; a < d; ++a) p[a] = axes[a].values[0];
  while (true) {
    if (!fn(std::span<const double>(p))) return false;
    std::size_t a = d;
    while (a-- > 0) {
      if (++idx[a] < axes[a].values.size()) {
        p[a] = axes[a].values[idx[a]];
        break;
      }
      idx[a] = 0;
      p[a] = axes[a].values[0];
    }
    if (a == static_cast<std::size_t>(-1)) return true;
  }
}

std::string layer_label(const LatticeLayer& layer) {
  std::ostringstream os;
  os << "layer j=" << layer.j << " (swap axis " << layer.swap_axis + 1 << ")";
  return os.str();
}

}  // namespace

void for_each_point(const ForestSpec& spec, const AxisBox& window, const EnumerateOptions& opt,
                    const PointVisitor& visit) {
  if (window.dim() != spec.dim()) throw InvalidArgument("window dimension does not match the forest");
  if (!(window.volume() > 0.0)) throw InvalidArgument("window must have positive volume");
  const double reach = window.max_abs_coordinate() + kTolerance;
  const auto& layers = spec.layers();
  std::vector<AxisValues> axes;
  std::vector<double> p(spec.dim());
  std::uint64_t emitted = 0;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& layer = layers[li];
    if (layer.coarse_spacing() > reach) break;
    double count = 0.0;
    if (!layer_axes(layer, window, axes, count, false)) continue;
    if (static_cast<double>(emitted) + count > static_cast<double>(opt.budget)) {
      std::ostringstream os;
      os << "lattice-forests: point budget " << opt.budget << " exceeded at " << layer_label(layer);
      throw BudgetExceeded(os.str());
    }
    if (!layer_axes(layer, window, axes, count, true)) continue;
    bool keep_going = for_each_combination(axes, p, [&](std::span<const double> q) {
      for (std::size_t prev = 0; prev < li; ++prev) {
        if (layers[prev].contains(q)) return true;
      }
      ++emitted;
      return visit(q);
    });
    if (!keep_going) return;
  }
}

PointSet enumerate_points(const ForestSpec& spec, const AxisBox& window, const EnumerateOptions& opt) {
  PointSet out(spec.dim());
  for_each_point(spec, window, opt, [&](std::span<const double> p) {
    out.push_back(p);
    return true;
  });
  return out;
}

std::uint64_t count_in_ball(const ForestSpec& spec, double T, const EnumerateOptions& opt) {
  if (!(T > 0.0)) throw InvalidArgument("ball radius must be positive");
  const double r2 = (T + kTolerance) * (T + kTolerance);
  std::uint64_t n = 0;
  for_each_point(spec, AxisBox::cube(spec.dim(), -T, T), opt, [&](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    if (s <= r2) ++n;
    return true;
  });
  return n;
}

double series_density_bound(const ForestSpec& spec, int j_max) {
  if (j_max < 1) throw InvalidArgument("j_max must be at least 1");
  const auto& sched = spec.schedule();
  if (static_cast<std::size_t>(j_max) > sched.size()) throw InvalidArgument("j_max beyond the stored schedule");
  const auto d = static_cast<double>(spec.dim());
  double sum = 0.0;
  for (int j = 0; j < j_max; ++j) {
    const auto& e = sched[static_cast<std::size_t>(j)];
    sum += std::pow(e.epsilon, -(d - 1.0)) / e.visibility;
  }
  return std::pow(2.0, d) * std::pow(d, d / 2.0) * sum;
}

// ---------------------------------------------------------------------------

LatticeForest::LatticeForest(ForestSpec spec) : spec_(std::move(spec)) {
  const auto d = static_cast<double>(spec_.dim());
  double density = 0.0;
  for (const auto& layer : spec_.layers()) {
    const double per_k = layer.coarse_index_set == IndexSet::kOdd ? 2.0 : 1.0;
    density += std::pow(layer.fine_spacing(), -(d - 1.0)) / (per_k * layer.coarse_spacing());
  }
  spacing_ = density > 0.0 ? std::pow(density, -1.0 / d) : 1.0;
}

bool LatticeForest::visit_box(const AxisBox& box, const PointVisitor& visit) const {
  if (box.dim() != spec_.dim()) throw InvalidArgument("box dimension does not match the forest");
  const double reach = box.max_abs_coordinate() + kTolerance;
  std::vector<AxisValues> axes;
  std::vector<double> p(spec_.dim());
  for (const auto& layer : spec_.layers()) {
    if (layer.coarse_spacing() > reach) break;
    double count = 0.0;
    if (!layer_axes(layer, box, axes, count, false)) continue;
    if (!std::isfinite(count)) throw BudgetExceeded("lattice-forests: probe box too large at " + layer_label(layer));
    if (!layer_axes(layer, box, axes, count, true)) continue;
    if (!for_each_combination(axes, p, visit)) return false;
  }
  return true;
}

std::vector<double> LatticeForest::hyperplane_hints() const {
  std::vector<double> out;
  for (const auto& layer : spec_.layers()) {
    const double c = layer.coarse_spacing();
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

}  // namespace danzer
