#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "danzer/errors.hpp"
#include "danzer/lattice_forest.hpp"
#include "danzer/rng.hpp"
#include "oracles.hpp"

using namespace danzer;
using namespace oracles;

namespace {

std::set<PointKey> naive_corollary(std::size_t d, double eta, const AxisBox& w) {
  std::set<PointKey> out;
  for (int j = 1; j <= 40; ++j) {
    const double arg = j * std::pow(std::log(static_cast<double>(j)), 1.0 + eta);
    const double c = static_cast<double>(naive_odd_ceiling(arg)) * std::pow(2.0, j * static_cast<int>(d - 1));
    if (c > w.max_abs_coordinate()) break;
    for (std::size_t axis = 0; axis < d; ++axis) naive_layer(d, axis, c, std::pow(2.0, -j), true, w, out);
  }
  return out;
}

// Closed-form point count of one layer inside a window.
double closed_form_layer_count(std::size_t d, std::size_t axis, double c, double f, bool odd_only, const AxisBox& w) {
  const double kl = std::ceil(w.lo()[axis] / c);
  const double kh = std::floor(w.hi()[axis] / c);
  double ks = 0.0;
  if (kh >= kl) {
    if (odd_only) {
      // F(x) = floor((x + 1) / 2) steps by one exactly at odd x.
      auto F = [](double x) { return std::floor((x + 1.0) / 2.0); };
      ks = F(kh) - F(kl - 1);
    } else {
      ks = kh - kl + 1 - ((kl <= 0 && kh >= 0) ? 1 : 0);
    }
  }
  double total = ks;
  for (std::size_t a = 0; a < d; ++a) {
    if (a == axis) continue;
    total *= std::max(0.0, std::floor(w.hi()[a] / f) - std::ceil(w.lo()[a] / f) + 1);
  }
  return total;
}

}  // namespace

TEST_CASE("odd ceiling is the smallest odd integer strictly above x") {
  CHECK(odd_ceiling(0.0) == 1);
  CHECK(odd_ceiling(2 * std::pow(std::log(2.0), 2)) == 1);
  CHECK(odd_ceiling(3 * std::pow(std::log(3.0), 2)) == 5);
  CHECK(odd_ceiling(1.0) == 3);
  CHECK(odd_ceiling(2.0) == 3);
  CHECK(odd_ceiling(3.0) == 5);
  for (double x = 0.0; x < 50.0; x += 0.37) CHECK(odd_ceiling(x) == naive_odd_ceiling(x));
}

TEST_CASE("corollary layer parameters") {
  const auto spec = corollary_forest_spec(2, 1.0);
  const double coarse[] = {2, 4, 40};
  const double fine[] = {0.5, 0.25, 0.125};
  for (int j = 1; j <= 3; ++j) {
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const auto& layer = spec.layers()[static_cast<std::size_t>(2 * (j - 1)) + axis];
      CHECK(layer.j == j);
      CHECK(layer.swap_axis == axis);
      CHECK(layer.coarse_spacing() == coarse[j - 1]);
      CHECK(layer.fine_spacing() == fine[j - 1]);
      CHECK(layer.coarse_index_set == IndexSet::kOdd);
    }
    CHECK(spec.schedule()[static_cast<std::size_t>(j) - 1].epsilon == fine[j - 1]);
    CHECK(spec.schedule()[static_cast<std::size_t>(j) - 1].visibility == coarse[j - 1]);
  }
  for (std::size_t d = 2; d <= 5; ++d) {
    const auto s = corollary_forest_spec(d, 0.5);
    for (const auto& layer : s.layers()) {
      const double arg = layer.j * std::pow(std::log(static_cast<double>(layer.j)), 1.5);
      CHECK(layer.coarse_spacing() ==
            static_cast<double>(naive_odd_ceiling(arg)) * std::pow(2.0, layer.j * static_cast<int>(d - 1)));
    }
  }
  CHECK_THROWS_AS(corollary_forest_spec(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(corollary_forest_spec(2, 0.0), InvalidArgument);
}

TEST_CASE("single layer enumeration") {
  LatticeLayer layer{2, {1.0, 2}, {1.0, -2}, IndexSet::kOdd, 0, 0.25};
  const ForestSpec spec(2, {layer}, {{0.25, 4.0}}, 0.0, "one layer");
  const auto pts = enumerate_points(spec, AxisBox{Point{0, 0}, Point{8, 1}});
  REQUIRE(pts.size() == 5);
  for (std::size_t l = 0; l < 5; ++l) {
    CHECK(pts[l][0] == 4.0);
    CHECK(pts[l][1] == 0.25 * static_cast<double>(l));
  }
}

TEST_CASE("window between the hyperplanes is empty") {
  const auto spec = corollary_forest_spec(2, 1.0);
  CHECK(enumerate_points(spec, AxisBox{Point{0.1, 0.1}, Point{0.4, 0.4}}).empty());
  CHECK(enumerate_points(spec, AxisBox{Point{-1.9, 0.6}, Point{1.9, 0.9}}).empty());
}

TEST_CASE("corollary enumeration matches the brute-force union") {
  const auto spec = corollary_forest_spec(2, 1.0);
  const AxisBox w{Point{0, 0}, Point{4, 4}};
  const auto pts = enumerate_points(spec, w);
  const auto s = as_set(pts);
  CHECK(s.size() == pts.size());
  CHECK(s == naive_corollary(2, 1.0, w));

  SplitMix64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.below(2);
    std::vector<double> lo(d), hi(d);
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = rng.uniform(-50, 40);
      hi[a] = lo[a] + rng.uniform(0.5, d == 2 ? 60 : 6);
    }
    const AxisBox box{Point(lo), Point(hi)};
    const auto sp = corollary_forest_spec(d, 1.0);
    const auto got = enumerate_points(sp, box);
    const auto gs = as_set(got);
    CHECK(gs.size() == got.size());
    CHECK(gs == naive_corollary(d, 1.0, box));
  }
}

TEST_CASE("layer enumeration matches the closed-form lattice count") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.below(2);
    const std::size_t axis = rng.below(d);
    const bool odd = rng.below(2) == 0;
    const int e = static_cast<int>(rng.below(4));
    LatticeLayer layer{1, {3.0, e}, {1.0, -e}, odd ? IndexSet::kOdd : IndexSet::kNonzero, axis, std::ldexp(1.0, -e)};
    const ForestSpec spec(d, {layer}, {{0.5, 3.0}}, 0.0, "layer");
    std::vector<double> lo(d), hi(d);
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = rng.uniform(-30, 20);
      hi[a] = lo[a] + rng.uniform(1, 30);
    }
    const AxisBox box{Point(lo), Point(hi)};
    const auto pts = enumerate_points(spec, box);
    CHECK(static_cast<double>(pts.size()) ==
          closed_form_layer_count(d, axis, layer.coarse_spacing(), layer.fine_spacing(), odd, box));
    std::set<PointKey> naive;
    naive_layer(d, axis, layer.coarse_spacing(), layer.fine_spacing(), odd, box, naive);
    CHECK(as_set(pts) == naive);
  }
}

TEST_CASE("generic forest uses every nonzero multiple") {
  const auto spec = theorem_forest_spec(2, {{0.5, 2.0}, {0.25, 8.0}}, 1.0);
  const AxisBox w{Point{-10, -3}, Point{10, 3}};
  const auto s = as_set(enumerate_points(spec, w));
  CHECK(s.count({4.0, 0.0}) == 1);
  CHECK(s.count({0.0, 0.0}) == 0);
  std::set<PointKey> naive;
  naive_layer(2, 0, 2.0, 0.5 / std::sqrt(2.0), false, w, naive);
  naive_layer(2, 1, 2.0, 0.5 / std::sqrt(2.0), false, w, naive);
  naive_layer(2, 0, 8.0, 0.25 / std::sqrt(2.0), false, w, naive);
  naive_layer(2, 1, 8.0, 0.25 / std::sqrt(2.0), false, w, naive);
  CHECK(s == naive);
}

TEST_CASE("enumeration is invariant under axis swaps on symmetric windows") {
  for (std::size_t d = 2; d <= 3; ++d) {
    const auto spec = corollary_forest_spec(d, 1.0);
    const double r = d == 2 ? 20.0 : 5.0;
    const auto s = as_set(enumerate_points(spec, AxisBox::cube(d, -r, r)));
    for (std::size_t i = 1; i < d; ++i) {
      for (auto p : s) {
        std::swap(p[0], p[i]);
        CHECK(s.count(p) == 1);
      }
    }
  }
}

TEST_CASE("enumeration order is deterministic") {
  const auto spec = corollary_forest_spec(2, 1.0);
  const AxisBox w = AxisBox::cube(2, -30, 30);
  const auto a = enumerate_points(spec, w);
  const auto b = enumerate_points(spec, w);
  CHECK(a.flat() == b.flat());
}

TEST_CASE("count_in_ball") {
  const auto spec = corollary_forest_spec(2, 1.0);
  CHECK(count_in_ball(spec, 0.5) == 0);

  const auto oracle = naive_corollary(2, 1.0, AxisBox::cube(2, -4, 4));
  std::uint64_t expected = 0;
  for (const auto& p : oracle) expected += (p[0] * p[0] + p[1] * p[1] <= 16.0 + 1e-9);
  CHECK(count_in_ball(spec, 4.0) == expected);

  std::uint64_t prev = 0;
  for (double T = 1.0; T <= 200.0; T *= 1.5) {
    const auto c = count_in_ball(spec, T);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("series density bound") {
  const auto one = theorem_forest_spec(2, {{0.5, 2.0}}, 0.0);
  CHECK(series_density_bound(one, 1) == doctest::Approx(8.0).epsilon(1e-12));

  const auto spec = corollary_forest_spec(2, 1.0);
  double sum = 0.0;
  for (int j = 1; j <= 10; ++j) sum += 1.0 / static_cast<double>(naive_odd_ceiling(j * std::pow(std::log(j), 2.0)));
  CHECK(series_density_bound(spec, 10) == doctest::Approx(8.0 * sum).epsilon(1e-12));

  double prev = 0.0;
  for (int j = 1; j <= 20; ++j) {
    const double b = series_density_bound(spec, j);
    CHECK(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(series_density_bound(spec, 0), InvalidArgument);
}

TEST_CASE("visibility is the schedule step function") {
  const auto spec = theorem_forest_spec(2, {{0.5, 2.0}, {0.25, 4.0}, {0.125, 8.0}}, 0.1);
  CHECK(spec.visibility(0.9) == 2.0);
  CHECK(spec.visibility(0.5) == 2.0);
  CHECK(spec.visibility(0.3) == 4.0);
  CHECK(spec.visibility(0.25) == 4.0);
  CHECK(spec.visibility(0.2) == 8.0);
  CHECK(spec.schedule_index(0.2) == 3);
  CHECK_THROWS_AS(spec.visibility(0.1), InvalidArgument);
  CHECK(spec.guaranteed_length(2) == doctest::Approx(2.0 * std::sqrt(2.0) * 4.0));
  CHECK(spec.density_index(1.0) == 0);
  CHECK(spec.density_index(4.0) == 2);
  CHECK(spec.density_index(100.0) == 3);
}

TEST_CASE("forest spec validation") {
  CHECK_THROWS_AS(theorem_forest_spec(2, {{0.25, 2.0}, {0.5, 4.0}}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(theorem_forest_spec(2, {{0.5, 4.0}, {0.25, 2.0}}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(theorem_forest_spec(2, {{0.5, 2.0}}, -1.0), InvalidArgument);
  CHECK_THROWS_AS(theorem_forest_spec(2, {{0.5, 2.0}}, NAN), InvalidArgument);
  CHECK_THROWS_AS(theorem_forest_spec(2, {}, 0.0), InvalidArgument);
  LatticeLayer bad{1, {1.0, 0}, {2.0, 0}, IndexSet::kOdd, 0, 0.5};
  CHECK_THROWS_AS(ForestSpec(2, {bad}, {{0.5, 1.0}}, 0.0, "bad"), InvalidArgument);
  LatticeLayer off_axis{1, {2.0, 0}, {1.0, -1}, IndexSet::kOdd, 2, 0.5};
  CHECK_THROWS_AS(ForestSpec(2, {off_axis}, {{0.5, 2.0}}, 0.0, "bad"), InvalidArgument);
}

TEST_CASE("point budget names the layer") {
  const auto spec = corollary_forest_spec(2, 1.0);
  try {
    enumerate_points(spec, AxisBox::cube(2, -1000, 1000), EnumerateOptions{1000});
    FAIL("expected a budget error");
  } catch (const BudgetExceeded& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lattice-forests") != std::string::npos);
    CHECK(msg.find("layer j=") != std::string::npos);
  }
}

TEST_CASE("point CSV format") {
  PointSet ps(2);
  ps.push_back(std::vector<double>{1.0 / 3.0, -2.0});
  ps.push_back(std::vector<double>{40.0, 0.125});
  std::ostringstream os;
  write_point_csv(os, ps);
  CHECK(os.str() == "# dim=2\n0.333333333333,-2\n40,0.125\n");
}
