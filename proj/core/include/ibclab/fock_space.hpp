#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "ibclab/model.hpp"
#include "ibclab/sector_basis.hpp"

namespace ibclab {

/// Discretized truncated Fock space: one SectorBasis per boson number
/// n = 0..n_max on a shared radial grid. Sectors may carry fewer nodes than
/// the grid (per-sector caps for the combinatorially large high sectors);
/// caps must be non-increasing in n. Immutable after construction.
class FockSpace {
 public:
  /// node_caps: optional per-sector node counts (index n); 0 entries mean
  /// "use grid.m". Effective caps are clamped to be non-increasing.
  static std::shared_ptr<const FockSpace> build(
      const RadialGrid& grid, int n_max, std::vector<int> node_caps = {},
      std::uint64_t max_entries = SectorBasis::default_capacity);

  const RadialGrid& grid() const { return grid_; }
  int n_max() const { return n_max_; }
  const SectorBasis& basis(int n) const { return bases_[n]; }
  int sector_nodes(int n) const { return bases_[n].m_nodes(); }

  std::int64_t dim() const { return dim_; }
  std::int64_t sector_offset(int n) const { return offsets_[n]; }
  std::int64_t sector_dim(int n) const { return bases_[n].size(); }
  int sector_of(std::int64_t dof) const;

  /// Inner-product weights w_i = h^n * multiplicity(entry), flattened.
  const Eigen::VectorXd& weights() const { return weights_; }

  bool same_layout(const FockSpace& other) const;

 private:
  RadialGrid grid_;
  int n_max_ = 0;
  std::vector<SectorBasis> bases_;
  std::vector<std::int64_t> offsets_;
  std::int64_t dim_ = 0;
  Eigen::VectorXd weights_;
};

using FockSpacePtr = std::shared_ptr<const FockSpace>;

}  // namespace ibclab
