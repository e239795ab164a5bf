#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ibclab/errors.hpp"

namespace ibclab {

/// Binomial coefficients C(a, b) for 0 <= a <= a_max, 0 <= b <= b_max,
/// exact in uint64 (the basis capacity check guards the range).
class BinomialTable {
 public:
  BinomialTable(int a_max, int b_max);
  std::uint64_t operator()(int a, int b) const {
    if (b < 0 || b > a) return 0;
    if (b > b_max_) throw Error("BinomialTable: b out of range");
    return c_[static_cast<std::size_t>(a) * (b_max_ + 1) + b];
  }

 private:
  int b_max_;
  std::vector<std::uint64_t> c_;
};

/// Number of multisets of size n over {1..m}, i.e. C(m+n-1, n), as a double
/// (used for capacity checks before exact enumeration).
double multiset_count_estimate(int n, int m);

/// Basis of the n-boson sector: all multisets {k_1 <= ... <= k_n} of grid
/// indices in {1..m_nodes}, enumerated in lexicographic order. The weight of
/// an entry is the number of ordered representatives, n!/prod(occupancy!),
/// which is the multiplicity carried by the discrete L2 norm.
class SectorBasis {
 public:
  static constexpr std::uint64_t default_capacity = 5'000'000;

  /// Enumerates the full basis. Throws CapacityError if C(m+n-1, n) exceeds
  /// max_entries.
  static SectorBasis build(int n, int m_nodes,
                           std::uint64_t max_entries = default_capacity);

  int n() const { return n_; }
  int m_nodes() const { return m_nodes_; }
  std::int64_t size() const { return size_; }

  /// Entry i as a sorted span of n node indices (empty for n = 0).
  std::span<const std::uint16_t> entry(std::int64_t i) const {
    return {entries_.data() + static_cast<std::size_t>(i) * n_,
            static_cast<std::size_t>(n_)};
  }

  /// Ordered-representative count n!/prod(occupancy!) of entry i.
  double weight(std::int64_t i) const;

  /// Lexicographic rank of a sorted multiset; the inverse of entry().
  std::int64_t rank(std::span<const std::uint16_t> sorted) const;

  /// Rank of entry `i` of the (n-1)-sector basis `lower` with node `k`
  /// inserted. Requires lower.n() == n-1 and 1 <= k <= m_nodes.
  std::int64_t rank_with_inserted(const SectorBasis& lower, std::int64_t i,
                                  int k) const;

 private:
  int n_ = 0;
  int m_nodes_ = 0;
  std::int64_t size_ = 0;
  std::vector<std::uint16_t> entries_;  // packed, size_ * n_
  BinomialTable binom_{1, 1};
};

}  // namespace ibclab
