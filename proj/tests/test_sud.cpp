#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "danzer/errors.hpp"
#include "danzer/rng.hpp"
#include "danzer/sud.hpp"
#include "oracles.hpp"

using namespace danzer;

namespace {

using u128 = unsigned __int128;

// (i, k) by trying every i.
IndexDecomposition naive_decompose(std::uint64_t n) {
  const u128 m = static_cast<u128>(n) + 2;
  for (int i = 1; i <= 66; ++i) {
    const u128 half = static_cast<u128>(1) << (i - 1);
    const u128 p = static_cast<u128>(1) << i;
    if (m >= half && (m - half) % p == 0) return {i, static_cast<std::uint64_t>((m - half) / p)};
  }
  return {0, 0};
}

// u_n as a numerator over 2^{i^2} following the two-branch formula literally.
std::pair<u128, int> naive_u(std::uint64_t n) {
  const auto [i, k] = naive_decompose(n);
  if (i > 7) return {0, 0};
  const int u = i * i;
  const u128 U = static_cast<u128>(1) << u;
  const u128 M = 2 * U * U;
  // k = r U + s (mod M), 1 <= s <= U
  const u128 kk = static_cast<u128>(k) % M;
  const u128 best_s = (kk + M - 1) % U + 1;
  const u128 best_r = ((kk + M - best_s) % M) / U;
  u128 num = best_r < U ? best_r * best_s : best_r * best_s + best_s;
  return {num % U, u};
}

double dyadic(const DyadicRational& d) { return d.to_double(); }

}  // namespace

TEST_CASE("dyadic rationals are reduced mod 1") {
  CHECK(DyadicRational(2, 2) == DyadicRational(1, 1));
  CHECK(DyadicRational(2, 2).numerator() == 1);
  CHECK(DyadicRational(2, 2).log2_denominator() == 1);
  CHECK(DyadicRational(5, 2) == DyadicRational(1, 2));
  CHECK(DyadicRational(4, 2) == DyadicRational());
  CHECK(DyadicRational().log2_denominator() == 0);
  CHECK(DyadicRational(3, 2) + DyadicRational(1, 1) == DyadicRational(1, 2));
  CHECK(DyadicRational(1, 3) - DyadicRational(1, 1) == DyadicRational(5, 3));
  CHECK(DyadicRational(3, 3).times(3) == DyadicRational(1, 3));
  CHECK(DyadicRational(1, 2) < DyadicRational(3, 3));
  CHECK(DyadicRational(3, 4).to_string() == "3/2^4");
  CHECK_THROWS_AS(DyadicRational::from_wide(1, 64), OverflowError);
}

TEST_CASE("decompose_index examples and identities") {
  CHECK(decompose_index(1) == IndexDecomposition{1, 1});
  CHECK(decompose_index(2) == IndexDecomposition{3, 0});
  CHECK(decompose_index(10) == IndexDecomposition{3, 1});
  CHECK_THROWS_AS(decompose_index(0), InvalidArgument);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    const auto d = decompose_index(n);
    CHECK_EQ(d, naive_decompose(n));
    CHECK_EQ(recompose_index(d), n);
  }
  const std::uint64_t top = ~std::uint64_t{0};
  CHECK(recompose_index(decompose_index(top)) == top);
  CHECK(recompose_index(decompose_index(top - 1)) == top - 1);
  CHECK(decompose_index(top - 1) == IndexDecomposition{65, 0});
  CHECK_THROWS_AS(recompose_index({1, top}), OverflowError);
}

TEST_CASE("block_decompose examples and inverse") {
  CHECK(block_decompose(1, 1) == BlockDecomposition{0, 1});
  CHECK(block_decompose(0, 1) == BlockDecomposition{3, 2});
  CHECK(block_decompose(4, 1) == BlockDecomposition{1, 2});
  for (int i = 1; i <= 2; ++i) {
    const std::uint64_t U = std::uint64_t{1} << (i * i);
    const std::uint64_t M = 2 * U * U;
    for (std::uint64_t k = 0; k <= 3 * M; ++k) {
      const auto [r, s] = block_decompose(k, i);
      CHECK(r < 2 * U);
      CHECK(s >= 1);
      CHECK(s <= U);
      CHECK((r * U + s) % M == k % M);
    }
  }
  CHECK_THROWS_AS(block_decompose(1, 0), InvalidArgument);
  CHECK_THROWS_AS(block_decompose(1, 8), OverflowError);
}

TEST_CASE("u_value and interleave examples") {
  CHECK(u_value(5) == DyadicRational(1, 1));
  CHECK(u_value(1) == DyadicRational());
  CHECK(u_value(9) == DyadicRational(1, 1));
  CHECK(interleave(5) == DyadicRational(1, 1));
  CHECK(interleave(5) == u_value(5));
  CHECK(interleave(2) == DyadicRational());
}

TEST_CASE("u_value matches the literal two-branch formula") {
  for (std::uint64_t n = 1; n <= 20000; ++n) {
    const auto [num, u] = naive_u(n);
    const auto v = u_value(n);
    CHECK(v == DyadicRational::from_wide(num, static_cast<unsigned>(u)));
    CHECK(v.log2_denominator() <= static_cast<unsigned>(u));
  }
}

TEST_CASE("u_value agrees with the block interleaving") {
  for (std::uint64_t n = 1; n <= 100000; ++n) CHECK_EQ(u_value(n), interleave(n));
  SplitMix64 rng(29);
  for (int t = 0; t < 100000; ++t) {
    const std::uint64_t n = 1 + rng.next() % (~std::uint64_t{0} - 1);
    CHECK_EQ(u_value(n), interleave(n));
  }
}

TEST_CASE("block values") {
  const auto b = block_values(1);
  REQUIRE(b.length == 8);
  CHECK(b.value(1) == DyadicRational());
  CHECK(b.value(2) == DyadicRational());
  CHECK(b.value(3) == DyadicRational(1, 1));
  CHECK(b.value(4) == DyadicRational());
  CHECK(b.value(8) == DyadicRational());
  for (int i = 1; i <= 3; ++i) {
    const auto blk = block_values(i);
    CHECK(blk.length == 2 * (std::uint64_t{1} << (2 * i * i)));
    for (std::uint64_t k = 1; k <= blk.length; k += (i == 3 ? 97 : 1)) {
      CHECK(blk.value(k).log2_denominator() <= static_cast<unsigned>(i * i));
      CHECK(blk.value(k) == block_value(i, k));
    }
  }
  CHECK_THROWS_AS(block_values(4), Infeasible);
  CHECK_THROWS_AS(b.value(9), InvalidArgument);
}

TEST_CASE("exact dispersion examples") {
  const std::vector<DyadicRational> a{DyadicRational(), DyadicRational(1, 1)};
  CHECK(exact_dispersion(a) == DyadicRational(1, 2));
  const std::vector<DyadicRational> b{DyadicRational()};
  CHECK(exact_dispersion(b) == DyadicRational(1, 1));
  const std::vector<DyadicRational> c{DyadicRational(), DyadicRational(1, 2), DyadicRational(1, 1),
                                      DyadicRational(3, 2)};
  CHECK(exact_dispersion(c) == DyadicRational(1, 3));
  CHECK(exact_dispersion(std::vector<double>{0.0, 0.5}) == 0.25);
  CHECK_THROWS_AS(exact_dispersion(std::vector<DyadicRational>{}), InvalidArgument);
  CHECK_THROWS_AS(exact_dispersion(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("exact dispersion agrees with the grid oracle") {
  SplitMix64 rng(31);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.below(30);
    std::vector<DyadicRational> pts;
    std::vector<double> real;
    for (std::size_t i = 0; i < n; ++i) {
      pts.emplace_back(rng.below(1u << 16), 16);
      real.push_back(pts.back().to_double());
    }
    const double exact = dyadic(exact_dispersion(pts));
    const double grid = oracles::grid_dispersion(real, 12);
    CHECK(std::fabs(exact - grid) <= std::ldexp(1.0, -12));
    CHECK(exact_dispersion(real) == exact);
  }
}

TEST_CASE("perturbed dispersion") {
  const DyadicSequence u = u_value;
  for (std::uint64_t N : {1, 5, 40}) {
    std::vector<DyadicRational> first;
    for (std::uint64_t i = 1; i <= N; ++i) first.push_back(u_value(i));
    CHECK(perturbed_dispersion(u, {N, 0, DyadicRational()}) == exact_dispersion(first));
  }
  const RealSequence zero = [](std::uint64_t) { return 0.0; };
  CHECK(perturbed_dispersion(zero, 3, 0, 1.0 / 3.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(perturbed_dispersion(zero, 3, 0, 4.0 / 3.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  SplitMix64 rng(37);
  for (int t = 0; t < 20; ++t) {
    const DyadicRational xi(rng.below(1u << 10), 10);
    const std::uint64_t m = rng.below(1000);
    DyadicRational prev(1, 1);
    for (std::uint64_t N = 1; N <= 64; ++N) {
      const auto d = perturbed_dispersion(u, {N, m, xi});
      CHECK(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("delta lower bound is attained at its argmax") {
  const DyadicSequence u = u_value;
  const auto r = delta_lower_bound(u, 8, 6, 4);
  CHECK(perturbed_dispersion(u, {8, r.argmax_m, r.argmax_xi}) == r.value);
  for (std::uint64_t m = 0; m <= 6; ++m) {
    for (std::uint64_t x = 0; x < 16; ++x) CHECK(perturbed_dispersion(u, {8, m, DyadicRational(x, 4)}) <= r.value);
  }
}

TEST_CASE("visibility constants of the interleaved sequence") {
  CHECK(block_index_for_epsilon(0.5) == 1);
  CHECK(block_index_for_epsilon(0.9) == 1);
  CHECK(block_index_for_epsilon(0.1) == 2);
  CHECK(block_index_for_epsilon(1.0 / 16) == 2);
  CHECK(block_index_for_epsilon(0.06) == 3);
  auto V = [](int i) { return 2.0 * std::pow(2.0, 2.0 * i * i); };
  for (double eps : {0.5, 0.3, 0.1, 0.01, 0.001}) {
    const auto w = w_constants(eps);
    const int i = w.i;
    const double v = 2.0 / (eps * eps);
    CHECK(w.lemma == doctest::Approx(std::pow(2.0, i + 2) * V(i) / V(i - 1) * v).epsilon(1e-12));
    CHECK(w.theorem == doctest::Approx(4.0 * std::pow(2.0, i) * V(i + 1) / V(i) * v).epsilon(1e-12));
  }
  CHECK_THROWS_AS(w_constants(1.0), InvalidArgument);
}

namespace {

// Half the largest circular gap of {c_k - k xi} over the designated window, xi on the proof grid.
double window_defect_oracle(const SudBlock& b) {
  const std::uint64_t U = std::uint64_t{1} << b.u;
  double worst = 0.0;
  for (std::uint64_t l = 0; l < U; ++l) {
    for (std::uint64_t lp = 1; lp <= U; ++lp) {
      const double xi = static_cast<double>(l) / U + static_cast<double>(lp) / (static_cast<double>(U) * U);
      std::vector<double> v;
      for (std::uint64_t j = 1; j <= U; ++j) {
        const std::uint64_t k = (l % 2 == 1) ? (lp - 1) * U + j : (U + lp - 1) * U + j;
        const double x = b.value(k).to_double() - static_cast<double>(k) * xi;
        v.push_back(x - std::floor(x));
      }
      worst = std::max(worst, exact_dispersion(v));
    }
  }
  return worst;
}

double sampled_sup(const SudBlock& b, int bits) {
  double worst = 0.0;
  std::vector<double> v(b.length);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << bits); ++x) {
    const double xi = std::ldexp(static_cast<double>(x), -bits);
    for (std::uint64_t k = 1; k <= b.length; ++k) {
      const double y = b.value(k).to_double() - static_cast<double>(k) * xi;
      v[k - 1] = y - std::floor(y);
    }
    worst = std::max(worst, exact_dispersion(v));
  }
  return worst;
}

}  // namespace

TEST_CASE("block verification certifies i=1 and i=2") {
  const double expected[] = {0.5, 0.0625};
  for (int i = 1; i <= 2; ++i) {
    const auto block = block_values(i);
    const auto rep = block_sud_verify(i);
    CHECK(rep.pass);
    REQUIRE(rep.certified_bound.has_value());
    CHECK(*rep.certified_bound == expected[i - 1]);
    CHECK(rep.continuum_complete);
    CHECK(rep.continuum_bound <= expected[i - 1]);

    const double w = window_defect_oracle(block);
    CHECK(rep.window_defect.to_double() == w);
    CHECK(rep.window_check == (w <= std::ldexp(1.0, -(i * i + 1))));

    const double sup = sampled_sup(block, 14);
    CHECK(sup <= rep.continuum_bound);
    CHECK(rep.continuum_lower.to_double() <= sup);
    REQUIRE(rep.grid_evaluated);
    CHECK(rep.grid_defect.to_double() <= sup);
  }
}

TEST_CASE("block verification rejects broken blocks") {
  const std::vector<std::uint64_t> zeros(512, 0);
  const auto rep = block_sud_verify_values(2, zeros);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.certified_bound.has_value());
  CHECK(rep.continuum_lower.to_double() > 0.49);
  CHECK(rep.continuum_lower.to_double() <= 0.5);
  CHECK(rep.continuum_bound >= 0.5);

  CHECK_THROWS_AS(block_sud_verify(4), Infeasible);
  CHECK_THROWS_AS(block_sud_verify_values(2, std::vector<std::uint64_t>(511, 0)), InvalidArgument);
  CHECK_THROWS_AS(block_sud_verify_values(2, std::vector<std::uint64_t>(512, 16)), InvalidArgument);
}

TEST_CASE("block verification respects the continuum budget") {
  BlockVerifyOptions opt;
  opt.continuum_budget = 1000;
  const auto rep = block_sud_verify(2, opt);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.continuum_complete);
  CHECK(rep.route.find("uncertified") == 0);
}

TEST_CASE("block verification is independent of the thread count") {
  BlockVerifyOptions one;
  one.threads = 1;
  BlockVerifyOptions four;
  four.threads = 4;
  const auto a = block_sud_verify(2, one);
  const auto b = block_sud_verify(2, four);
  CHECK(a.window_defect == b.window_defect);
  CHECK(a.grid_defect == b.grid_defect);
  CHECK(a.continuum_bound == b.continuum_bound);
  CHECK(a.cells == b.cells);
}
