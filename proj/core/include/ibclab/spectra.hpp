#pragma once

#include <optional>
#include <vector>

#include "ibclab/fock_vector.hpp"
#include "ibclab/sparse.hpp"

namespace ibclab {

struct SpectralResult {
  std::vector<double> eigenvalues;   // ascending
  std::vector<FockVector> eigenvectors;
  std::vector<double> residuals;     // ||A x - E x|| (weighted norm), ||x||=1
  int iterations = 0;
  std::string method;
};

struct SolverOptions {
  enum class Mode { Auto, Dense, Lanczos, ShiftInvert };
  Mode mode = Mode::Auto;
  std::uint64_t seed = 42;
  int max_matvecs = 200000;
  int basis_size = 0;        // 0: pick from k
  double shift = 0.0;        // ShiftInvert target; 0: auto below spectrum
  std::int64_t dense_threshold = 2000;
};

/// k lowest eigenpairs of a Hermitian operator in its weighted inner
/// product. Dense diagonalization below dense_threshold (the universal
/// oracle), otherwise Lanczos with full reorthogonalization against the
/// retained basis and thick restarts. Deterministic for a fixed seed.
/// Throws ConvergenceError with a residual report when max_matvecs is hit.
SpectralResult lowest_eigenpairs(const SparseHermitian& a, int k, double tol,
                                 const SolverOptions& opts = {});

struct RichardsonFit {
  double limit = 0.0;
  double error_estimate = 0.0;  // rms fit residual
  double coefficient = 0.0;
  double order = 1.0;
};

/// Fits value(h) = limit + c h^p through >= 3 samples at distinct h.
/// p is fixed when given (default 1), otherwise fit by scanning.
RichardsonFit richardson_extrapolate(
    const std::vector<std::pair<double, double>>& samples,
    std::optional<double> fixed_order = 1.0);

}  // namespace ibclab
