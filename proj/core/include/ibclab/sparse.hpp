#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibclab/fock_space.hpp"
#include "ibclab/fock_vector.hpp"

namespace ibclab {

/// One coordinate-form entry of the operator matrix.
struct SparseEntry {
  std::int32_t row;
  std::int32_t col;
  Complex value;
};

/// Symmetric sparse operator in coordinate form together with the discrete
/// inner-product weights it is Hermitian against. Entries are the operator
/// matrix A (row = output dof), Hermiticity meaning (W A)^dagger = W A with
/// W = diag(weights). Immutable after construction.
class SparseHermitian {
 public:
  SparseHermitian() = default;

  /// Merges duplicate coordinates, sorts, drops exact zeros, caches the
  /// orthonormal-coordinate form W^(1/2) A W^(-1/2) for solvers.
  SparseHermitian(FockSpacePtr space, std::vector<SparseEntry> entries);

  std::int64_t dim() const { return space_ ? space_->dim() : 0; }
  const FockSpacePtr& space() const { return space_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(entries_.size()); }
  bool is_real() const { return is_real_; }

  /// max_{i,j} |(W A)_ij - conj((W A)_ji)|.
  double hermiticity_defect() const;

  /// True when all entries couple sectors n, n' with |n - n'| <= 1.
  bool block_tridiagonal() const;

  /// y = A x in operator (weighted) coordinates.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  FockVector apply(const FockVector& v) const;

  /// <u, A u> with the weighted inner product (the energy functional).
  double expectation(const FockVector& v) const;

  /// Orthonormal-coordinate symmetric form, real path valid iff is_real().
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& sym_real() const;
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& sym_complex() const;

  Eigen::MatrixXcd to_dense_operator() const;

  /// max |A_ij - B_ij| over the union of both entry patterns.
  static double max_entry_difference(const SparseHermitian& a,
                                     const SparseHermitian& b);

  void write_coordinate_text(std::ostream& os) const;
  static SparseHermitian read_coordinate_text(FockSpacePtr space,
                                              std::istream& is);

 private:
  FockSpacePtr space_;
  std::vector<SparseEntry> entries_;
  bool is_real_ = true;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sym_real_;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> sym_complex_;
};

/// hermiticity_defect as a free function, matching the operation vocabulary.
inline double hermiticity_defect(const SparseHermitian& a) {
  return a.hermiticity_defect();
}

}  // namespace ibclab
