#include "danzer/sud.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "danzer/errors.hpp"
#include "danzer/geometry.hpp"
#include "danzer/parallel.hpp"

namespace danzer {

namespace {

using u128 = unsigned __int128;

void check_block_index(int i) {
  if (i < 1) throw InvalidArgument("block index i must be at least 1");
}

}  // namespace

IndexDecomposition decompose_index(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("sequence index n must be at least 1");
  const u128 m = static_cast<u128>(n) + 2;
  const auto lo = static_cast<std::uint64_t>(m);
  const int v = lo == 0 ? 64 : std::countr_zero(lo);
  return {v + 1, static_cast<std::uint64_t>(m >> (v + 1))};
}

std::uint64_t recompose_index(const IndexDecomposition& d) {
  if (d.i < 1 || d.i > 65) throw InvalidArgument("decomposition index i out of range");
  if (d.i >= 64 && d.k > 0) throw OverflowError("recomposed index does not fit 64 bits");
  const u128 n = (static_cast<u128>(d.k) << d.i) + (static_cast<u128>(1) << (d.i - 1)) - 2;
  if (n > std::numeric_limits<std::uint64_t>::max() || n == 0) {
    throw OverflowError("recomposed index does not fit 64 bits");
  }
  return static_cast<std::uint64_t>(n);
}

BlockDecomposition block_decompose(std::uint64_t k, int i) {
  check_block_index(i);
  if (i > kMaxBlockIndex) throw OverflowError("block index i=" + std::to_string(i) + " exceeds 64-bit (r, s) range");
  const int u = i * i;
  const u128 U = static_cast<u128>(1) << u;
  const u128 M = 2 * U * U;
  u128 rho = static_cast<u128>(k) % M;
  if (rho == 0) rho = M;
  const u128 r = (rho - 1) / U;
  return {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(rho - r * U)};
}

DyadicRational u_value(std::uint64_t n) {
  const auto [i, k] = decompose_index(n);
  // Beyond kMaxBlockIndex a 64-bit k is either 0 (the last block term) or
  // below 2^{i^2} (row r = 0); both terms vanish.
  if (i > kMaxBlockIndex) return {};
  const int u = i * i;
  const u128 U = static_cast<u128>(1) << u;
  const auto [r, s] = block_decompose(k, i);
  u128 num = static_cast<u128>(r) * s;
  if (r >= U) num += s;
  return DyadicRational::from_wide(num, static_cast<unsigned>(u));
}

DyadicRational block_value(int i, unsigned __int128 k) {
  check_block_index(i);
  if (i > kMaxBlockIndex) throw OverflowError("block index i=" + std::to_string(i) + " exceeds 64-bit (r, s) range");
  const auto u = static_cast<unsigned>(i * i);
  const u128 U = static_cast<u128>(1) << u;
  if (k < 1 || k > 2 * U * U) throw InvalidArgument("block position outside [1, V_i]");
  const u128 r = (k - 1) / U;
  const u128 s = k - r * U;
  DyadicRational c = DyadicRational::from_wide(r * s, u);
  if (r >= U) c = c + DyadicRational::from_wide(s, u);
  return c;
}

DyadicRational interleave(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("sequence index n must be at least 1");
  const u128 m = static_cast<u128>(n) + 2;
  int i = 1;
  u128 p = 2;
  while (m % p == 0) {
    p <<= 1;
    ++i;
  }
  const u128 k = (m - p / 2) / p;
  if (i > kMaxBlockIndex) {
    // Position V_i of block i (k = 0) is (2U - 1) U / U + U / U = 2U, i.e. 0;
    // every other 64-bit k sits in row r = 0.
    return {};
  }
  const auto u = static_cast<unsigned>(i * i);
  const u128 V = static_cast<u128>(2) << (2 * u);
  u128 pos = k % V;
  if (pos == 0) pos = V;
  return block_value(i, pos);
}

DyadicRational SudBlock::value(std::uint64_t k) const {
  if (k < 1 || k > length) throw InvalidArgument("block position outside [1, V_i]");
  return DyadicRational(numerators[k - 1], static_cast<unsigned>(u));
}

SudBlock block_values(int i) {
  check_block_index(i);
  if (i > kMaxMaterializedBlock) {
    throw Infeasible("block i=" + std::to_string(i) + " is too long to materialize; use block_value");
  }
  SudBlock b;
  b.i = i;
  b.u = i * i;
  const std::uint64_t U = std::uint64_t{1} << b.u;
  b.length = 2 * U * U;
  b.numerators.resize(b.length);
  std::uint64_t r = 0;
  std::uint64_t s = 1;
  for (std::uint64_t k = 0; k < b.length; ++k) {
    std::uint64_t num = r * s;
    if (r >= U) num += s;
    b.numerators[k] = num & (U - 1);
    if (++s > U) {
      s = 1;
      ++r;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------

DyadicRational exact_dispersion(std::span<const DyadicRational> points) {
  if (points.empty()) throw InvalidArgument("dispersion of an empty point set");
  unsigned q = 0;
  for (const auto& p : points) q = std::max(q, p.log2_denominator());
  if (q > 62) throw OverflowError("dispersion needs denominators up to 2^62");
  std::vector<std::uint64_t> v(points.size());
  std::transform(points.begin(), points.end(), v.begin(), [q](const DyadicRational& p) { return p.scaled(q); });
  std::sort(v.begin(), v.end());
  std::uint64_t gap = (std::uint64_t{1} << q) - v.back() + v.front();
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::max(gap, v[i] - v[i - 1]);
  return DyadicRational::from_wide(gap, q + 1);
}

double exact_dispersion(std::span<const double> points) {
  if (points.empty()) throw InvalidArgument("dispersion of an empty point set");
  std::vector<double> v(points.size());
  std::transform(points.begin(), points.end(), v.begin(), [](double x) {
    if (!std::isfinite(x)) throw InvalidArgument("torus value is not finite");
    return wrap_unit(x);
  });
  std::sort(v.begin(), v.end());
  double gap = 1.0 - v.back() + v.front();
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::max(gap, v[i] - v[i - 1]);
  return gap / 2.0;
}

namespace {

void check_range(std::uint64_t N, std::uint64_t m) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (m > std::numeric_limits<std::uint64_t>::max() - N) throw OverflowError("index m + N overflows");
}

}  // namespace

DyadicRational perturbed_dispersion(const DyadicSequence& seq, const DispersionQuery& q) {
  check_range(q.N, q.m);
  std::vector<DyadicRational> pts;
  pts.reserve(q.N);
  for (std::uint64_t i = 1; i <= q.N; ++i) pts.push_back(seq(i + q.m) - q.xi.times(i));
  return exact_dispersion(pts);
}

double perturbed_dispersion(const RealSequence& seq, std::uint64_t N, std::uint64_t m, double xi) {
  check_range(N, m);
  if (!std::isfinite(xi)) throw InvalidArgument("xi is not finite");
  std::vector<double> pts;
  pts.reserve(N);
  const double x = xi - std::floor(xi);
  for (std::uint64_t i = 1; i <= N; ++i) {
    pts.push_back(seq(i + m) - std::fmod(static_cast<double>(i) * x, 1.0));
  }
  return exact_dispersion(pts);
}

DeltaLowerBound delta_lower_bound(const DyadicSequence& seq, std::uint64_t N, std::uint64_t m_max,
                                  unsigned xi_log2) {
  if (xi_log2 > 30) throw InvalidArgument("xi grid finer than 2^-30 is not supported");
  DeltaLowerBound best{{}, 0, {}};
  bool first = true;
  for (std::uint64_t m = 0; m <= m_max; ++m) {
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << xi_log2); ++x) {
      const DyadicRational xi(x, xi_log2);
      const DyadicRational d = perturbed_dispersion(seq, {N, m, xi});
      if (first || d > best.value) {
        best = {d, m, xi};
        first = false;
      }
    }
  }
  return best;
}

int block_index_for_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  int i = std::max(1, static_cast<int>(std::ceil(std::sqrt(-std::log2(eps)))));
  while (std::ldexp(1.0, -i * i) > eps) ++i;
  while (i > 1 && std::ldexp(1.0, -(i - 1) * (i - 1)) <= eps) --i;
  return i;
}

WConstants w_constants(double eps) {
  const int i = block_index_for_epsilon(eps);
  const double v_eps = 2.0 / (eps * eps);
  // V_i = 2 * 2^{2 i^2}, so V_i / V_{i-1} = 2^{2(2i - 1)}.
  const double lemma = std::ldexp(v_eps, (i + 2) + 2 * (2 * i - 1));
  const double theorem = std::ldexp(v_eps, 2 + i + 2 * (2 * i + 1));
  return {i, lemma, theorem};
}

// ---------------------------------------------------------------------------

namespace {

struct Arc {
  std::uint64_t value;
  std::uint64_t k;
};

// Largest circular gap of sorted values in units 2^-bits (bits <= 64).
u128 max_circular_gap(const std::vector<std::uint64_t>& v, unsigned bits) {
  const u128 one = static_cast<u128>(1) << bits;
  u128 gap = one - v.back() + v.front();
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::max<u128>(gap, v[i] - v[i - 1]);
  return gap;
}

struct CellResult {
  u128 bound2;  // twice the dispersion bound, units 2^-64
  u128 gap;     // exact largest gap at the centre, units 2^-64
};

CellResult evaluate_cell(std::span<const std::uint64_t> nums, unsigned u, int t, std::uint64_t a) {
  const std::uint64_t V = nums.size();
  const std::uint64_t k0 = V / 2;
  const std::uint64_t centre = (2 * a + 1) << (63 - t);
  std::vector<Arc> arcs(V);
  for (std::uint64_t k = 1; k <= V; ++k) {
    arcs[k - 1] = {(nums[k - 1] << (64 - u)) - k * centre, k};
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.value < y.value; });
  auto weight = [&](std::uint64_t k) {
    const std::uint64_t dk = k > k0 ? k - k0 : k0 - k;
    return static_cast<u128>(dk) << (63 - t);
  };
  const u128 one = static_cast<u128>(1) << 64;
  u128 gap = one - arcs.back().value + arcs.front().value;
  u128 bound = gap + weight(arcs.back().k) + weight(arcs.front().k);
  for (std::size_t j = 1; j < arcs.size(); ++j) {
    const u128 g = arcs[j].value - arcs[j - 1].value;
    gap = std::max(gap, g);
    bound = std::max(bound, g + weight(arcs[j].k) + weight(arcs[j - 1].k));
  }
  return {bound, gap};
}

}  // namespace

BlockVerifyReport block_sud_verify_values(int i, std::span<const std::uint64_t> nums, const BlockVerifyOptions& opt) {
  check_block_index(i);
  if (i > kMaxMaterializedBlock) {
    throw Infeasible("block verification is exhaustive and limited to i <= " + std::to_string(kMaxMaterializedBlock));
  }
  const auto u = static_cast<unsigned>(i * i);
  const std::uint64_t U = std::uint64_t{1} << u;
  const std::uint64_t V = 2 * U * U;
  if (nums.size() != V) throw InvalidArgument("block must have exactly V_i terms");
  for (auto x : nums) {
    if (x >= U) throw InvalidArgument("block numerator must be below 2^{i^2}");
  }

  BlockVerifyReport rep{};
  rep.i = i;
  rep.u = static_cast<int>(u);
  rep.block_length = V;

  // Grid xi = l / 2^u + l' / 2^{2u}, in units 2^{-2u}.
  const unsigned bits = 2 * u;
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  auto term = [&](std::uint64_t k, std::uint64_t xi) { return ((nums[k - 1] << u) - k * xi) & mask; };

  {
    std::vector<u128> worst(U, 0);
    parallel_for(U, opt.threads, [&](std::size_t l) {
      std::vector<std::uint64_t> v(U);
      for (std::uint64_t lp = 1; lp <= U; ++lp) {
        const std::uint64_t xi = l * U + lp;
        const std::uint64_t m0 = (l % 2 == 1) ? lp - 1 : U + lp - 1;
        for (std::uint64_t j = 1; j <= U; ++j) v[j - 1] = term(m0 * U + j, xi);
        std::sort(v.begin(), v.end());
        worst[l] = std::max(worst[l], max_circular_gap(v, bits));
      }
    });
    const u128 g = *std::max_element(worst.begin(), worst.end());
    rep.window_defect = DyadicRational::from_wide(g, bits + 1);
    rep.window_check = g <= (static_cast<u128>(1) << u);
  }

  const u128 grid_work = static_cast<u128>(U) * U * V;
  rep.grid_evaluated = grid_work <= opt.grid_budget;
  if (rep.grid_evaluated) {
    std::vector<u128> worst(U * U, 0);
    parallel_for(U * U, opt.threads, [&](std::size_t idx) {
      const std::uint64_t xi = idx + 1;
      std::vector<std::uint64_t> v(V);
      for (std::uint64_t k = 1; k <= V; ++k) v[k - 1] = term(k, xi);
      std::sort(v.begin(), v.end());
      worst[idx] = max_circular_gap(v, bits);
    });
    const u128 g = *std::max_element(worst.begin(), worst.end());
    rep.grid_defect = DyadicRational::from_wide(g, bits + 1);
    rep.grid_check = g <= (static_cast<u128>(1) << u);
    rep.work += static_cast<std::uint64_t>(grid_work);
  }

  // Cells [a 2^-t, (a+1) 2^-t] of the torus; refine those whose bound misses 2^-u.
  const u128 target2 = static_cast<u128>(1) << (65 - u);
  constexpr int kMaxDepth = 61;
  std::vector<std::uint64_t> frontier{0};
  u128 accepted_max = 0;
  u128 pending_max = 0;
  u128 lower_gap = 0;
  std::uint64_t work = 0;
  int t = 0;
  bool complete = false;
  std::string stop_reason;
  while (true) {
    const u128 level_work = static_cast<u128>(frontier.size()) * V;
    if (work + level_work > opt.continuum_budget) {
      stop_reason = "continuum budget exhausted at cell depth " + std::to_string(t);
      break;
    }
    std::vector<CellResult> res(frontier.size());
    parallel_for(frontier.size(), opt.threads,
                 [&](std::size_t c) { res[c] = evaluate_cell(nums, u, t, frontier[c]); });
    work += static_cast<std::uint64_t>(level_work);
    rep.cells += frontier.size();
    rep.cell_depth = t;
    std::vector<std::uint64_t> next;
    pending_max = 0;
    for (std::size_t c = 0; c < frontier.size(); ++c) {
      lower_gap = std::max(lower_gap, res[c].gap);
      if (res[c].bound2 <= target2) {
        accepted_max = std::max(accepted_max, res[c].bound2);
      } else {
        pending_max = std::max(pending_max, res[c].bound2);
        next.push_back(2 * frontier[c]);
        next.push_back(2 * frontier[c] + 1);
      }
    }
    if (next.empty()) {
      complete = true;
      break;
    }
    if (t == kMaxDepth) {
      stop_reason = "cell depth limit reached";
      break;
    }
    frontier = std::move(next);
    ++t;
  }
  rep.work += work;
  rep.continuum_complete = complete;
  const u128 bound2 = std::max(accepted_max, pending_max);
  rep.continuum_bound = std::ldexp(static_cast<double>(bound2), -65);
  rep.continuum_lower = DyadicRational::from_wide(lower_gap, 65);
  rep.pass = complete;
  if (complete) {
    rep.certified_bound = std::ldexp(1.0, -static_cast<int>(u));
    rep.route = "lipschitz cells over the whole torus";
  } else {
    rep.route = "uncertified: " + stop_reason;
  }
  return rep;
}

BlockVerifyReport block_sud_verify(int i, const BlockVerifyOptions& opt) {
  check_block_index(i);
  if (i > kMaxMaterializedBlock) {
    throw Infeasible("block verification is exhaustive and limited to i <= " + std::to_string(kMaxMaterializedBlock));
  }
  const SudBlock block = block_values(i);
  return block_sud_verify_values(i, block.numerators, opt);
}

}  // namespace danzer
