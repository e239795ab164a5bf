#pragma once

#include <vector>

#include "ibclab/fock_vector.hpp"
#include "ibclab/sparse.hpp"

namespace ibclab {

/// Time-stepping record: snapshots of the state with the sector weights,
/// boundary fluxes and energy at each stored time.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<FockVector> snapshots;
  std::vector<std::vector<double>> sector_weights;  // [snap][n]
  /// flux[snap][n] for n = 1..n_max: probability per unit time flowing
  /// from sector n into sector n-1 through the source boundary,
  /// 2 Im <v^(n-1), C v^(n)> built from the same one-sided stencil as the
  /// assembly (flux[snap][0] is identically 0 and kept for alignment).
  std::vector<std::vector<double>> flux;
  std::vector<double> energy;
};

struct PropagateOptions {
  double tol = 1e-12;       // linear-solve relative residual per step
  int snapshot_every = 1;   // store every this-many steps
  int max_cg_iterations = 10000;
};

/// Crank-Nicolson (implicit midpoint) propagation:
/// (I + i dt/2 A) v_{t+dt} = (I - i dt/2 A) v_t, solved by conjugate
/// gradients on the normal equations in the weighted inner product.
/// Unitary up to the solve tolerance. Throws ConvergenceError when the
/// linear solve stalls.
Trajectory propagate(const SparseHermitian& a, const FockVector& v0,
                     double dt, int steps, const PropagateOptions& opts = {});

/// Discrete balance check: compares d/dt P(n) (centered differences over
/// snapshots) against the net boundary flux flux[n+1] - flux[n].
/// residual[snap][n] for n = 0..n_max-1; endpoint snapshots carry NaN.
std::vector<std::vector<double>> flux_balance_residual(const Trajectory& traj);

}  // namespace ibclab
