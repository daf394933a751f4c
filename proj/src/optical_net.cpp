#include "danzer/optical_net.hpp"

#include <algorithm>
#include <cmath>

#include "danzer/errors.hpp"

namespace danzer {

NetSpec NetSpec::make(std::size_t dim, int n) {
  if (dim < 2) throw InvalidArgument("net dimension must be at least 2");
  if (n < 1) throw InvalidArgument("net index n must be at least 1");
  const int d1 = static_cast<int>(dim) - 1;
  const long long e = static_cast<long long>(d1) * static_cast<long long>(dim) * n;
  if (e > 1000) throw InvalidArgument("net scale is outside double range");
  const auto d = static_cast<double>(dim);
  const double eps = std::ldexp(1.0, -static_cast<int>(e));
  const double tau = 2.0 * std::pow(d, 1.0 / (2.0 * d)) * std::ldexp(1.0, d1 * n);
  return {dim, n, eps, tau};
}

ForestSpec optical_forest_spec(std::size_t dim) {
  if (dim < 2) throw InvalidArgument("forest dimension must be at least 2");
  const int d1 = static_cast<int>(dim) - 1;
  const double base = 1.0 / std::sqrt(static_cast<double>(d1));
  const int j_max = std::max(2, 60 / d1);
  std::vector<LatticeLayer> layers;
  for (int j = 1; j <= j_max; ++j) {
    for (std::size_t axis = 0; axis < dim; ++axis) {
      LatticeLayer layer;
      layer.j = j;
      layer.coarse = {1.0, d1 * j};
      layer.fine = {base, -(j + 1)};
      layer.coarse_index_set = IndexSet::kNonzero;
      layer.swap_axis = axis;
      layer.epsilon = std::ldexp(1.0, -d1 * static_cast<int>(dim) * j);
      layers.push_back(layer);
    }
  }
  return ForestSpec(dim, std::move(layers), {}, 0.0, "optical(d=" + std::to_string(dim) + ")");
}

PointSet optical_forest_points(std::size_t dim, const AxisBox& window, const EnumerateOptions& opt) {
  return enumerate_points(optical_forest_spec(dim), window, opt);
}

EpsilonNet epsilon_net(std::size_t dim, int n, const EnumerateOptions& opt) {
  const NetSpec spec = NetSpec::make(dim, n);
  const PointSet patch = enumerate_points(optical_forest_spec(dim), AxisBox::cube(dim, 0.0, spec.tau), opt);
  PointSet out(dim);
  out.reserve(patch.size());
  std::vector<double> q(dim);
  for (std::size_t i = 0; i < patch.size(); ++i) {
    const auto p = patch[i];
    for (std::size_t a = 0; a < dim; ++a) q[a] = std::clamp(p[a] / spec.tau - 0.5, -0.5, 0.5);
    out.push_back(q);
  }
  const double inv = 1.0 / spec.epsilon;
  const std::size_t card = out.size();
  return {spec, std::move(out), card, static_cast<double>(card) / (inv * std::log(inv))};
}

int net_index_for_epsilon(std::size_t dim, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (dim < 2) throw InvalidArgument("net dimension must be at least 2");
  const double step = static_cast<double>((dim - 1) * dim);
  return std::max(1, static_cast<int>(std::ceil(-std::log2(eps) / step - 1e-12)));
}

}  // namespace danzer
