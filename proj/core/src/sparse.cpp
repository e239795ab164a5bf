#include "ibclab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "ibclab/errors.hpp"

namespace ibclab {

SparseHermitian::SparseHermitian(FockSpacePtr space,
                                 std::vector<SparseEntry> entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  // merge duplicates in place
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size();) {
    SparseEntry e = entries_[i];
    std::size_t j = i + 1;
    while (j < entries_.size() && entries_[j].row == e.row &&
           entries_[j].col == e.col) {
      e.value += entries_[j].value;
      ++j;
    }
    if (e.value != 0.0) entries_[out++] = e;
    i = j;
  }
  entries_.resize(out);

  is_real_ = true;
  for (const auto& e : entries_)
    if (e.value.imag() != 0.0) {
      is_real_ = false;
      break;
    }

  const auto& w = space_->weights();
  Eigen::VectorXd sw = w.array().sqrt();
  if (is_real_) {
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(entries_.size());
    for (const auto& e : entries_)
      tr.emplace_back(e.row, e.col, sw[e.row] * e.value.real() / sw[e.col]);
    sym_real_.resize(dim(), dim());
    sym_real_.setFromTriplets(tr.begin(), tr.end());
    sym_real_.makeCompressed();
  } else {
    std::vector<Eigen::Triplet<Complex>> tr;
    tr.reserve(entries_.size());
    for (const auto& e : entries_)
      tr.emplace_back(e.row, e.col, sw[e.row] * e.value / sw[e.col]);
    sym_complex_.resize(dim(), dim());
    sym_complex_.setFromTriplets(tr.begin(), tr.end());
    sym_complex_.makeCompressed();
  }
}

double SparseHermitian::hermiticity_defect() const {
  const auto& w = space_->weights();
  auto find = [this](std::int32_t r, std::int32_t c) -> Complex {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), std::pair<std::int32_t, std::int32_t>{r, c},
        [](const SparseEntry& e, const std::pair<std::int32_t, std::int32_t>& k) {
          return e.row != k.first ? e.row < k.first : e.col < k.second;
        });
    if (it != entries_.end() && it->row == r && it->col == c) return it->value;
    return Complex(0.0, 0.0);
  };
  double defect = 0.0;
  for (const auto& e : entries_) {
    Complex wa = w[e.row] * e.value;
    Complex wat = w[e.col] * find(e.col, e.row);
    defect = std::max(defect, std::abs(wa - std::conj(wat)));
  }
  return defect;
}

bool SparseHermitian::block_tridiagonal() const {
  for (const auto& e : entries_) {
    int nr = space_->sector_of(e.row);
    int nc = space_->sector_of(e.col);
    if (std::abs(nr - nc) > 1) return false;
  }
  return true;
}

Eigen::VectorXcd SparseHermitian::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != dim()) throw ShapeError("SparseHermitian::apply: size");
  const auto& w = space_->weights();
  Eigen::VectorXd sw = w.array().sqrt();
  Eigen::VectorXcd xs = x.array() * sw.array().cast<Complex>();
  Eigen::VectorXcd ys(dim());
  if (is_real_) {
    ys.real() = sym_real_ * xs.real();
    ys.imag() = sym_real_ * xs.imag();
  } else {
    ys = sym_complex_ * xs;
  }
  return ys.array() / sw.array().cast<Complex>();
}

FockVector SparseHermitian::apply(const FockVector& v) const {
  if (!v.space()->same_layout(*space_))
    throw ShapeError("SparseHermitian::apply: basis mismatch");
  return FockVector::unflatten(space_, apply(v.flatten()));
}

double SparseHermitian::expectation(const FockVector& v) const {
  return inner_product(v, apply(v)).real();
}

const Eigen::SparseMatrix<double, Eigen::RowMajor>& SparseHermitian::sym_real()
    const {
  if (!is_real_) throw Error("SparseHermitian: complex matrix has no real form");
  return sym_real_;
}

const Eigen::SparseMatrix<Complex, Eigen::RowMajor>&
SparseHermitian::sym_complex() const {
  if (is_real_) throw Error("SparseHermitian: real path active");
  return sym_complex_;
}

Eigen::MatrixXcd SparseHermitian::to_dense_operator() const {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim(), dim());
  for (const auto& e : entries_) a(e.row, e.col) += e.value;
  return a;
}

double SparseHermitian::max_entry_difference(const SparseHermitian& a,
                                             const SparseHermitian& b) {
  if (a.dim() != b.dim())
    throw ShapeError("max_entry_difference: dimension mismatch");
  double d = 0.0;
  std::size_t i = 0, j = 0;
  auto key = [](const SparseEntry& e) {
    return std::pair<std::int32_t, std::int32_t>{e.row, e.col};
  };
  while (i < a.entries_.size() || j < b.entries_.size()) {
    if (j >= b.entries_.size() ||
        (i < a.entries_.size() && key(a.entries_[i]) < key(b.entries_[j]))) {
      d = std::max(d, std::abs(a.entries_[i].value));
      ++i;
    } else if (i >= a.entries_.size() || key(b.entries_[j]) < key(a.entries_[i])) {
      d = std::max(d, std::abs(b.entries_[j].value));
      ++j;
    } else {
      d = std::max(d, std::abs(a.entries_[i].value - b.entries_[j].value));
      ++i;
      ++j;
    }
  }
  return d;
}

void SparseHermitian::write_coordinate_text(std::ostream& os) const {
  os << dim() << " " << nnz() << "\n";
  char buf[128];
  for (const auto& e : entries_) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", e.row, e.col,
                  e.value.real(), e.value.imag());
    os << buf;
  }
}

SparseHermitian SparseHermitian::read_coordinate_text(FockSpacePtr space,
                                                      std::istream& is) {
  std::int64_t dim = 0, nnz = 0;
  if (!(is >> dim >> nnz)) throw IoError("coordinate text: bad header");
  if (dim != space->dim())
    throw ShapeError("coordinate text: dimension does not match space");
  std::vector<SparseEntry> entries;
  entries.reserve(nnz);
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int32_t r, c;
    double re, im;
    if (!(is >> r >> c >> re >> im)) throw IoError("coordinate text: bad entry");
    entries.push_back({r, c, Complex(re, im)});
  }
  return SparseHermitian(std::move(space), std::move(entries));
}

}  // namespace ibclab
