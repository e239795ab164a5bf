#include "ibclab/fock_vector.hpp"

#include <cmath>
#include <numeric>

#include "ibclab/errors.hpp"

namespace ibclab {

double SectorWeights::total() const {
  return std::accumulate(p.begin(), p.end(), 0.0);
}

FockVector::FockVector(FockSpacePtr space) : space_(std::move(space)) {
  sectors_.resize(space_->n_max() + 1);
  for (int n = 0; n <= space_->n_max(); ++n)
    sectors_[n] = Eigen::VectorXcd::Zero(space_->sector_dim(n));
}

Eigen::VectorXcd FockVector::flatten() const {
  Eigen::VectorXcd x(space_->dim());
  for (int n = 0; n <= space_->n_max(); ++n)
    x.segment(space_->sector_offset(n), space_->sector_dim(n)) = sectors_[n];
  return x;
}

FockVector FockVector::unflatten(FockSpacePtr space,
                                 const Eigen::VectorXcd& x) {
  if (x.size() != space->dim())
    throw ShapeError("FockVector::unflatten: size mismatch");
  FockVector v(space);
  for (int n = 0; n <= space->n_max(); ++n)
    v.sectors_[n] = x.segment(space->sector_offset(n), space->sector_dim(n));
  return v;
}

double FockVector::norm2() const {
  double s = 0.0;
  const auto& w = space_->weights();
  for (int n = 0; n <= space_->n_max(); ++n) {
    const auto seg = w.segment(space_->sector_offset(n), space_->sector_dim(n));
    s += (seg.array() * sectors_[n].array().abs2()).sum();
  }
  return s;
}

double FockVector::norm() const { return std::sqrt(norm2()); }

void FockVector::scale(Complex s) {
  for (auto& sec : sectors_) sec *= s;
}

Complex inner_product(const FockVector& u, const FockVector& w) {
  if (!u.space() || !w.space() || !u.space()->same_layout(*w.space()))
    throw ShapeError("inner_product: grid/basis mismatch");
  const auto& wt = u.space()->weights();
  Complex s = 0.0;
  for (int n = 0; n <= u.n_max(); ++n) {
    const auto seg =
        wt.segment(u.space()->sector_offset(n), u.space()->sector_dim(n));
    s += (seg.array() * (u.sector(n).conjugate().array() *
                         w.sector(n).array()))
             .sum();
  }
  return s;
}

SectorWeights sector_weights(const FockVector& v) {
  SectorWeights sw;
  const auto& wt = v.space()->weights();
  sw.p.resize(v.n_max() + 1);
  for (int n = 0; n <= v.n_max(); ++n) {
    const auto seg =
        wt.segment(v.space()->sector_offset(n), v.space()->sector_dim(n));
    sw.p[n] = (seg.array() * v.sector(n).array().abs2()).sum();
  }
  return sw;
}

FockVector product_state_from_profile(FockSpacePtr space,
                                      const std::function<double(double)>& f,
                                      const std::vector<Complex>& n_weights) {
  FockVector v(space);
  const auto& grid = space->grid();
  std::vector<double> fval(grid.m + 1, 0.0);
  for (int k = 1; k <= grid.m; ++k) {
    fval[k] = f(grid.node(k));
    if (!std::isfinite(fval[k]))
      throw Error("product_state_from_profile: profile not finite at node");
  }
  for (int n = 0; n <= space->n_max(); ++n) {
    Complex amp = n < static_cast<int>(n_weights.size()) ? n_weights[n] : 0.0;
    if (amp == 0.0) continue;
    const auto& b = space->basis(n);
    for (std::int64_t i = 0; i < b.size(); ++i) {
      double prod = 1.0;
      for (auto k : b.entry(i)) prod *= fval[k];
      v.sector(n)[i] = amp * prod;
    }
  }
  return v;
}

FockVector vacuum_state(FockSpacePtr space) {
  FockVector v(space);
  v.sector(0)[0] = 1.0;
  return v;
}

}  // namespace ibclab
