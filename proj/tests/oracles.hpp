#pragma once
// Brute-force reference implementations shared by the tests.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "danzer/geometry.hpp"
#include "danzer/point_set.hpp"

namespace oracles {

using danzer::AxisBox;
using danzer::PointSet;

using PointKey = std::vector<double>;

inline std::set<PointKey> as_set(const PointSet& ps) {
  std::set<PointKey> s;
  for (std::size_t i = 0; i < ps.size(); ++i) s.emplace(ps[i].begin(), ps[i].end());
  return s;
}

inline long long naive_odd_ceiling(double x) {
  long long n = 1;
  while (n <= x) n += 2;
  return n;
}

// One layer generated by brute-force loops: coarse coordinate k*c on `axis`,
// fine multiples l*f elsewhere.
inline void naive_layer(std::size_t d, std::size_t axis, double c, double f, bool odd_only, const AxisBox& w,
                 std::set<PointKey>& out) {
  const long long kmax = static_cast<long long>(w.max_abs_coordinate() / c) + 1;
  std::vector<std::vector<double>> fine_values(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (a == axis) continue;
    const long long lo = static_cast<long long>(std::floor(w.lo()[a] / f)) - 1;
    const long long hi = static_cast<long long>(std::ceil(w.hi()[a] / f)) + 1;
    for (long long l = lo; l <= hi; ++l) {
      const double x = static_cast<double>(l) * f;
      if (x >= w.lo()[a] && x <= w.hi()[a]) fine_values[a].push_back(x);
    }
  }
  for (long long k = -kmax; k <= kmax; ++k) {
    if (k == 0 || (odd_only && k % 2 == 0)) continue;
    const double x = static_cast<double>(k) * c;
    if (x < w.lo()[axis] || x > w.hi()[axis]) continue;
    std::vector<std::size_t> idx(d, 0);
    PointKey p(d);
    p[axis] = x;
    bool empty = false;
    for (std::size_t a = 0; a < d; ++a) empty = empty || (a != axis && fine_values[a].empty());
    if (empty) continue;
    while (true) {
      for (std::size_t a = 0; a < d; ++a) {
        if (a != axis) p[a] = fine_values[a][idx[a]];
      }
      out.insert(p);
      std::size_t a = 0;
      for (; a < d; ++a) {
        if (a == axis) continue;
        if (++idx[a] < fine_values[a].size()) break;
        idx[a] = 0;
      }
      if (a == d) break;
    }
  }
}


// Largest open axis-parallel rectangle in [-1/2, 1/2]^2 free of points, by
// trying every rectangle whose sides lie on point coordinates or the border.
inline double brute_force_empty_rectangle(const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> xs{-0.5, 0.5};
  std::vector<double> ys{-0.5, 0.5};
  for (const auto& [x, y] : pts) {
    xs.push_back(x);
    ys.push_back(y);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double best = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      for (std::size_t c = 0; c < ys.size(); ++c) {
        for (std::size_t e = c + 1; e < ys.size(); ++e) {
          const double area = (xs[b] - xs[a]) * (ys[e] - ys[c]);
          if (area <= best) continue;
          bool empty = true;
          for (const auto& [x, y] : pts) {
            if (x > xs[a] && x < xs[b] && y > ys[c] && y < ys[e]) {
              empty = false;
              break;
            }
          }
          if (empty) best = area;
        }
      }
    }
  }
  return best;
}

// sup over x of the torus distance to the nearest point, with x restricted to
// the grid k / 2^bits.
inline double grid_dispersion(const std::vector<double>& pts, int bits) {
  const long long n = 1LL << bits;
  double worst = 0.0;
  for (long long k = 0; k < n; ++k) {
    const double x = std::ldexp(static_cast<double>(k), -bits);
    double best = 1.0;
    for (double p : pts) {
      const double t = std::fabs(x - p);
      best = std::min(best, std::min(t - std::floor(t), std::ceil(t) - t));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace oracles
