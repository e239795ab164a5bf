#pragma once

#include <Eigen/Core>
#include <vector>

#include "ibclab/model.hpp"

namespace ibclab {

/// Closed-form ground-state data of the single-source model in natural
/// units: energy, Poisson mean of the boson number, cloud decay rate and
/// normalization constant.
struct GroundTruth {
  double e_min = 0.0;
  double lambda_mean = 0.0;
  double kappa = 0.0;
  double n_norm = 1.0;
};

/// e_min = g^2 sqrt(2 e0) / (2 pi), lambda = g^2 / (2 pi sqrt(2 e0)),
/// kappa = sqrt(2 e0), n_norm = exp(-lambda/2). Throws for e0 <= 0.
GroundTruth exact_ground(const ModelParams& model);

/// Fixed source positions of the multi-center model.
struct CenterSet {
  std::vector<Eigen::Vector3d> positions;

  static CenterSet two(double separation);
  void validate() const;  // pairwise distinct
};

/// Ground energy with N fixed sources:
/// (g^2/pi) [ N sqrt(2 e0)/2 - sum_{i<j} exp(-kappa R_ij)/R_ij ].
double two_center_ground(const ModelParams& model, const CenterSet& centers);

/// Pair potential V(R) = -(g^2/pi) exp(-kappa R)/R, i.e. the two-center
/// ground energy minus its R -> infinity limit. Throws for R <= 0.
double yukawa_pair_potential(const ModelParams& model, double r);

struct MulticenterResidual {
  double ibc = 0.0;       // boundary-limit mismatch, max over samples
  double eigen_eq = 0.0;  // interior eigen-equation mismatch, max
  double max() const { return ibc > eigen_eq ? ibc : eigen_eq; }
};

/// Checks that the closed-form multi-center ground state satisfies all N
/// boundary conditions and the interior eigen-equation at the given sample
/// configurations. Limits r -> 0 are taken numerically (Richardson in r);
/// the c_n ratios are solved from the boundary condition itself. Samples
/// closer than 1e-8 to a center are rejected with an error.
MulticenterResidual ibc_residual_multicenter(
    const ModelParams& model, const CenterSet& centers,
    const std::vector<std::vector<Eigen::Vector3d>>& samples,
    std::uint64_t direction_seed = 42);

/// Deterministic sample configurations around the centers, sizes cycling
/// through 0..n_top, kept at least min_dist away from every center.
std::vector<std::vector<Eigen::Vector3d>> draw_multicenter_samples(
    const CenterSet& centers, int n_top, int count, std::uint64_t seed,
    double min_dist = 0.25, double box_radius = 2.5);

/// Self-energy of the smeared model from the coherent-state closed form,
/// E_phi = -g^2 Int d^3k |phi_hat(k)|^2 / (k^2/2 + e0), evaluated by
/// adaptive radial quadrature for the normalized Gaussian of width sigma.
/// Fourier convention: phi_hat(k) = (2 pi)^(-3/2) Int e^(-i k y) phi(y).
double van_hove_self_energy(const ModelParams& model, double sigma);

/// g^2 sqrt(e0) / (4 pi): the constant offset between the cutoff-removed
/// Hamiltonian and the boundary-condition Hamiltonian.
double renorm_constant(const ModelParams& model);

}  // namespace ibclab
