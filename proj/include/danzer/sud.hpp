#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "danzer/dyadic.hpp"

namespace danzer {

/// n = k 2^i + 2^{i-1} - 2.
struct IndexDecomposition {
  int i;
  std::uint64_t k;
  friend bool operator==(const IndexDecomposition&, const IndexDecomposition&) = default;
};

/// k = r 2^{i^2} + s (mod 2 * 2^{2 i^2}), 0 <= r < 2 * 2^{i^2}, 1 <= s <= 2^{i^2}.
struct BlockDecomposition {
  std::uint64_t r;
  std::uint64_t s;
  friend bool operator==(const BlockDecomposition&, const BlockDecomposition&) = default;
};

/// Largest block index whose (r, s) parameters fit 64 bits.
inline constexpr int kMaxBlockIndex = 7;
/// Largest block index that block_values() materializes.
inline constexpr int kMaxMaterializedBlock = 3;

IndexDecomposition decompose_index(std::uint64_t n);
/// Inverse of decompose_index; OverflowError if n does not fit 64 bits.
std::uint64_t recompose_index(const IndexDecomposition& d);

/// OverflowError for i > kMaxBlockIndex.
BlockDecomposition block_decompose(std::uint64_t k, int i);

/// Term u_n of the digital sequence, exact.
DyadicRational u_value(std::uint64_t n);

/// Same term computed through the block interleaving: block i(n), position
/// k mod V_i with the residue 0 read as position V_i.
DyadicRational interleave(std::uint64_t n);

/// c_k^{(i)} for a block position k in [1, V_i], i <= kMaxBlockIndex.
DyadicRational block_value(int i, unsigned __int128 k);

/// Block c^{(i)}: numerators over 2^u with u = i^2, length V_i = 2 * 2^{2u}.
struct SudBlock {
  int i;
  int u;
  std::uint64_t length;
  std::vector<std::uint64_t> numerators;

  /// 1-based term c_k.
  DyadicRational value(std::uint64_t k) const;
};

/// Infeasible for i > kMaxMaterializedBlock.
SudBlock block_values(int i);

/// Half the largest circular gap; exact. Inputs may have denominators up to 2^62.
DyadicRational exact_dispersion(std::span<const DyadicRational> points);
/// Same for doubles, which are reduced mod 1 first.
double exact_dispersion(std::span<const double> points);

struct DispersionQuery {
  std::uint64_t N;
  std::uint64_t m;
  DyadicRational xi;
};

using DyadicSequence = std::function<DyadicRational(std::uint64_t)>;
using RealSequence = std::function<double(std::uint64_t)>;

/// Dispersion of {a_{i+m} - i xi : 1 <= i <= N}.
DyadicRational perturbed_dispersion(const DyadicSequence& seq, const DispersionQuery& q);
double perturbed_dispersion(const RealSequence& seq, std::uint64_t N, std::uint64_t m, double xi);

/// Max of perturbed_dispersion over m in [0, m_max] and xi on the 2^-xi_log2 grid.
/// Only a lower bound for the super-uniform dispersion.
struct DeltaLowerBound {
  DyadicRational value;
  std::uint64_t argmax_m;
  DyadicRational argmax_xi;
};
DeltaLowerBound delta_lower_bound(const DyadicSequence& seq, std::uint64_t N, std::uint64_t m_max,
                                  unsigned xi_log2);

/// Block index i with 2^{-i^2} <= eps < 2^{-(i-1)^2}.
int block_index_for_epsilon(double eps);

/// Both published forms of the visibility function of the interleaved sequence.
struct WConstants {
  int i;
  double lemma;    ///< 2^{i+2} (V_i / V_{i-1}) V(eps)
  double theorem;  ///< 4 2^i (V_{i+1} / V_i) V(eps)
};
WConstants w_constants(double eps);

struct BlockVerifyOptions {
  /// Term evaluations allowed for the full-block grid check.
  std::uint64_t grid_budget = std::uint64_t{1} << 30;
  /// Term evaluations allowed for the continuum cell certificate.
  std::uint64_t continuum_budget = std::uint64_t{1} << 30;
  unsigned threads = 0;
};

struct BlockVerifyReport {
  int i;
  int u;
  std::uint64_t block_length;
  /// Worst half-gap over the designated windows at the grid xi; target 2^-(u+1).
  DyadicRational window_defect;
  bool window_check;
  /// Worst dispersion of the whole block at the grid xi; target 2^-(u+1).
  bool grid_evaluated;
  DyadicRational grid_defect;
  bool grid_check;
  /// Sound upper bound on sup over all xi, from Lipschitz cells.
  double continuum_bound;
  /// Largest exact dispersion seen at a cell centre; a lower bound on the sup.
  DyadicRational continuum_lower;
  bool continuum_complete;
  int cell_depth;
  std::uint64_t cells;
  std::uint64_t work;
  std::string route;
  bool pass;
  std::optional<double> certified_bound;
};

BlockVerifyReport block_sud_verify(int i, const BlockVerifyOptions& opt = {});
/// Same checks for an arbitrary block given as numerators over 2^{i^2}.
BlockVerifyReport block_sud_verify_values(int i, std::span<const std::uint64_t> numerators,
                                          const BlockVerifyOptions& opt = {});

}  // namespace danzer
