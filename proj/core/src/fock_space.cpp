#include "ibclab/fock_space.hpp"

#include <algorithm>
#include <cmath>

#include "ibclab/errors.hpp"

namespace ibclab {

std::shared_ptr<const FockSpace> FockSpace::build(const RadialGrid& grid,
                                                  int n_max,
                                                  std::vector<int> node_caps,
                                                  std::uint64_t max_entries) {
  grid.validate();
  if (n_max < 0) throw ConfigError("FockSpace: n_max must be >= 0");

  auto sp = std::make_shared<FockSpace>();
  sp->grid_ = grid;
  sp->n_max_ = n_max;

  int prev_nodes = grid.m;
  for (int n = 0; n <= n_max; ++n) {
    int cap = grid.m;
    if (n < static_cast<int>(node_caps.size()) && node_caps[n] > 0)
      cap = std::min(cap, node_caps[n]);
    cap = std::min(cap, prev_nodes);  // caps non-increasing in n
    prev_nodes = cap;
    sp->bases_.push_back(SectorBasis::build(n, cap, max_entries));
  }

  sp->offsets_.resize(n_max + 2);
  sp->offsets_[0] = 0;
  for (int n = 0; n <= n_max; ++n)
    sp->offsets_[n + 1] = sp->offsets_[n] + sp->bases_[n].size();
  sp->dim_ = sp->offsets_[n_max + 1];

  sp->weights_.resize(sp->dim_);
  for (int n = 0; n <= n_max; ++n) {
    const auto& b = sp->bases_[n];
    const double hn = std::pow(grid.h, n);
    for (std::int64_t i = 0; i < b.size(); ++i)
      sp->weights_[sp->offsets_[n] + i] = hn * b.weight(i);
  }
  return sp;
}

int FockSpace::sector_of(std::int64_t dof) const {
  for (int n = 0; n <= n_max_; ++n)
    if (dof < offsets_[n + 1]) return n;
  throw ShapeError("FockSpace::sector_of: dof out of range");
}

bool FockSpace::same_layout(const FockSpace& other) const {
  if (n_max_ != other.n_max_ || dim_ != other.dim_) return false;
  if (grid_.h != other.grid_.h || grid_.m != other.grid_.m ||
      grid_.r_min != other.grid_.r_min)
    return false;
  for (int n = 0; n <= n_max_; ++n)
    if (bases_[n].m_nodes() != other.bases_[n].m_nodes()) return false;
  return true;
}

}  // namespace ibclab
