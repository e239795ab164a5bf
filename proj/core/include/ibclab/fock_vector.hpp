#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <vector>

#include "ibclab/fock_space.hpp"

namespace ibclab {

using Complex = std::complex<double>;

/// Sector-resolved occupation weights P(n); sums to the squared norm.
struct SectorWeights {
  std::vector<double> p;
  double total() const;
};

/// State of the truncated Fock space in reduced radial coordinates
/// v^(n) = (4 pi)^(n/2) (prod r_j) psi^(n), one coefficient per multiset
/// basis entry. Sector 0 is the vacuum amplitude.
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(FockSpacePtr space);

  const FockSpacePtr& space() const { return space_; }
  int n_max() const { return space_->n_max(); }

  Eigen::VectorXcd& sector(int n) { return sectors_[n]; }
  const Eigen::VectorXcd& sector(int n) const { return sectors_[n]; }

  /// Flat view across sectors (matching FockSpace dof indexing).
  Eigen::VectorXcd flatten() const;
  static FockVector unflatten(FockSpacePtr space, const Eigen::VectorXcd& x);

  double norm2() const;  // squared weighted norm
  double norm() const;
  void scale(Complex s);

 private:
  FockSpacePtr space_;
  std::vector<Eigen::VectorXcd> sectors_;
};

/// Weighted inner product sum_n h^n sum_entries weight * conj(u) * w.
/// Conjugate-linear in the first argument. Throws ShapeError on layout
/// mismatch.
Complex inner_product(const FockVector& u, const FockVector& w);

/// P(n) = squared weighted norm of sector n.
SectorWeights sector_weights(const FockVector& v);

/// Product state: sector-n coefficients n_weight(n) * prod_j f(r_j).
/// n_weights shorter than n_max+1 is zero-padded.
FockVector product_state_from_profile(FockSpacePtr space,
                                      const std::function<double(double)>& f,
                                      const std::vector<Complex>& n_weights);

/// Vacuum state (sector-0 amplitude 1).
FockVector vacuum_state(FockSpacePtr space);

}  // namespace ibclab
