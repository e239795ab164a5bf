#include "ibclab/sector_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ibclab {

BinomialTable::BinomialTable(int a_max, int b_max) : b_max_(b_max) {
  c_.assign(static_cast<std::size_t>(a_max + 1) * (b_max + 1), 0);
  for (int a = 0; a <= a_max; ++a) {
    for (int b = 0; b <= std::min(a, b_max); ++b) {
      std::uint64_t v;
      if (b == 0 || b == a) {
        v = 1;
      } else {
        v = c_[static_cast<std::size_t>(a - 1) * (b_max_ + 1) + b - 1] +
            c_[static_cast<std::size_t>(a - 1) * (b_max_ + 1) + b];
      }
      c_[static_cast<std::size_t>(a) * (b_max_ + 1) + b] = v;
    }
  }
}

double multiset_count_estimate(int n, int m) {
  if (n == 0) return 1.0;
  // lgamma keeps the estimate finite far beyond uint64 range
  double lg = std::lgamma(m + n + 0.0) - std::lgamma(n + 1.0) -
              std::lgamma(m + 0.0);
  return std::exp(lg);
}

SectorBasis SectorBasis::build(int n, int m_nodes, std::uint64_t max_entries) {
  if (n < 0) throw Error("SectorBasis: n must be >= 0");
  if (m_nodes < 1) throw Error("SectorBasis: m_nodes must be >= 1");
  if (m_nodes > std::numeric_limits<std::uint16_t>::max())
    throw Error("SectorBasis: m_nodes exceeds index range");

  double est = multiset_count_estimate(n, m_nodes);
  if (est > 1.0000001 * static_cast<double>(max_entries))
    throw CapacityError("SectorBasis: C(" + std::to_string(m_nodes + n - 1) +
                        "," + std::to_string(n) + ") = " +
                        std::to_string(est) + " exceeds capacity " +
                        std::to_string(max_entries));

  SectorBasis b;
  b.n_ = n;
  b.m_nodes_ = m_nodes;
  b.binom_ = BinomialTable(m_nodes + std::max(n, 1), n + 1);
  b.size_ = static_cast<std::int64_t>(b.binom_(m_nodes + n - 1, n));

  if (n == 0) {
    // single empty multiset (the vacuum configuration)
    return b;
  }

  b.entries_.reserve(static_cast<std::size_t>(b.size_) * n);
  std::vector<std::uint16_t> cur(n, 1);
  while (true) {
    b.entries_.insert(b.entries_.end(), cur.begin(), cur.end());
    int j = n - 1;
    while (j >= 0 && cur[j] == m_nodes) --j;
    if (j < 0) break;
    ++cur[j];
    for (int i = j + 1; i < n; ++i) cur[i] = cur[j];
  }
  return b;
}

double SectorBasis::weight(std::int64_t i) const {
  if (n_ == 0) return 1.0;
  auto e = entry(i);
  // n!/prod(occ!) accumulated as prod_j (j+1)/run_j over the sorted entry
  double w = 1.0;
  int run = 0;
  for (int j = 0; j < n_; ++j) {
    run = (j > 0 && e[j] == e[j - 1]) ? run + 1 : 1;
    w *= double(j + 1) / double(run);
  }
  return w;
}

std::int64_t SectorBasis::rank(std::span<const std::uint16_t> sorted) const {
  if (static_cast<int>(sorted.size()) != n_)
    throw ShapeError("SectorBasis::rank: wrong multiset size");
  if (n_ == 0) return 0;
  // map to a strictly increasing combination over {1..m+n-1}, then use the
  // lexicographic combinatorial number system
  const int big = m_nodes_ + n_ - 1;
  std::uint64_t r = 0;
  int prev = 0;
  for (int j = 0; j < n_; ++j) {
    int s = sorted[j] + j;  // strictly increasing
    int rem = n_ - 1 - j;   // elements still to place
    // count combinations whose element j lies in (prev, s)
    r += binom_(big - prev, rem + 1) - binom_(big - s + 1, rem + 1);
    prev = s;
  }
  return static_cast<std::int64_t>(r);
}

std::int64_t SectorBasis::rank_with_inserted(const SectorBasis& lower,
                                             std::int64_t i, int k) const {
  if (lower.n() != n_ - 1)
    throw ShapeError("SectorBasis::rank_with_inserted: sector mismatch");
  auto e = lower.entry(i);
  std::uint16_t buf[64];
  if (n_ > 64) throw Error("SectorBasis: sector size out of range");
  int pos = 0;
  while (pos < n_ - 1 && e[pos] < k) {
    buf[pos] = e[pos];
    ++pos;
  }
  buf[pos] = static_cast<std::uint16_t>(k);
  for (int j = pos; j < n_ - 1; ++j) buf[j + 1] = e[j];
  return rank({buf, static_cast<std::size_t>(n_)});
}

}  // namespace ibclab
