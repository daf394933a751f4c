#pragma once

#include <cstddef>

#include "danzer/lattice_forest.hpp"

namespace danzer {

/// Scale parameters of the n-th net in dimension d.
struct NetSpec {
  std::size_t dim;
  int n;
  double epsilon;  ///< 2^{-(d-1)dn}
  double tau;      ///< 2 d^{1/(2d)} 2^{(d-1)n}

  static NetSpec make(std::size_t dim, int n);
};

/// Optical forest: layers k 2^{(d-1)j} (k != 0) with fine step
/// 1/(sqrt(d-1) 2^{j+1}), unioned over the d axis swaps.
ForestSpec optical_forest_spec(std::size_t dim);

/// Points of the optical forest inside the window, each once.
PointSet optical_forest_points(std::size_t dim, const AxisBox& window, const EnumerateOptions& opt = {});

struct EpsilonNet {
  NetSpec spec;
  PointSet points;  ///< inside [-1/2, 1/2]^d
  std::size_t cardinality;
  double bound_ratio;  ///< cardinality / (eps^-1 ln eps^-1)
};

/// The patch Q_n = forest ∩ [0, tau]^d mapped by x -> x / tau - 1/2.
EpsilonNet epsilon_net(std::size_t dim, int n, const EnumerateOptions& opt = {});

/// Smallest n whose net epsilon does not exceed eps.
int net_index_for_epsilon(std::size_t dim, double eps);

}  // namespace danzer
