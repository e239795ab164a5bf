#pragma once

#include "ibclab/ibc_spec.hpp"
#include "ibclab/model.hpp"
#include "ibclab/sparse.hpp"

namespace ibclab {

/// Reduced-coordinate boundary constant of the Dirichlet condition,
/// v^(n+1)(., 0) = c_n v^(n) with c_n = -g / (sqrt(pi) sqrt(n+1)).
double dirichlet_boundary_constant(double g, int n);

/// Point-source Hamiltonian with the requested boundary-condition family.
/// Kinetic -(1/2) d^2/dr^2 per coordinate (second-order central interior),
/// diagonal n*e0, sector coupling from eliminating the constrained boundary
/// node. Dirichlet is assembled from the discrete quadratic form and is
/// positive semidefinite by construction. Requires grid.r_min == 0.
SparseHermitian assemble_ibc(const ModelParams& model, const IbcSpec& spec,
                             const FockSpacePtr& space);

/// Same construction with the constrained node on the sphere r = delta.
/// Requires grid.r_min == delta and delta >= h.
SparseHermitian assemble_shell(const ModelParams& model, double delta_shell,
                               const FockSpacePtr& space);

/// Smeared-source Hamiltonian: free part (zero boundary value at the
/// origin) plus creation/annihilation couplings through the trapezoidal
/// quadrature of sqrt(4 pi) r phi(r). Requires grid.r_min == 0.
SparseHermitian assemble_smeared(const ModelParams& model,
                                 const std::function<double(double)>& phi,
                                 const FockSpacePtr& space);
SparseHermitian assemble_smeared(const ModelParams& model,
                                 const CutoffSpec& cutoff,
                                 const FockSpacePtr& space);

}  // namespace ibclab
