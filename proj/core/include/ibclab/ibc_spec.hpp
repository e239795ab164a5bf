#pragma once

#include <complex>
#include <functional>

#include "ibclab/errors.hpp"

namespace ibclab {

using Complex = std::complex<double>;

/// Which boundary-condition family couples the sectors at the source.
/// Robin carries the four coefficients of the general family; the boundary
/// condition reads (alpha + beta d/dr)(r psi) -> (2/sqrt(n+1)) psi and the
/// Hamiltonian's creation term uses (gamma + delta d/dr)(r psi).
struct IbcSpec {
  enum class Kind { Dirichlet, Neumann, Robin };

  Kind kind = Kind::Dirichlet;
  Complex alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
  /// When false, Robin assembly skips the admissibility gate (used by the
  /// audit to measure the Hermiticity defect of violating tuples).
  bool enforce_admissibility = true;

  static IbcSpec dirichlet() { return {Kind::Dirichlet, 0, 0, 0, 0, true}; }
  static IbcSpec neumann() { return {Kind::Neumann, 0, 0, 0, 0, true}; }
  static IbcSpec robin(Complex a, Complex b, Complex c, Complex d,
                       bool enforce = true) {
    return {Kind::Robin, a, b, c, d, enforce};
  }

  /// Robin coefficients that reproduce the Dirichlet assembly.
  static IbcSpec robin_dirichlet_map(double g);
  /// Robin coefficients that reproduce the Neumann assembly.
  static IbcSpec robin_neumann_map(double g);
};

/// UV regularization of the point source: emission/absorption on a sphere
/// of radius delta_shell, or a smeared charge density (default: normalized
/// 3D Gaussian of width sigma, restricted to its radial profile).
struct CutoffSpec {
  enum class Kind { Shell, Smeared };

  Kind kind = Kind::Smeared;
  double delta_shell = 0.0;
  double sigma = 0.5;

  static CutoffSpec shell(double delta) {
    return {Kind::Shell, delta, 0.0};
  }
  static CutoffSpec smeared(double sigma) {
    return {Kind::Smeared, 0.0, sigma};
  }
};

/// Normalized 3D Gaussian charge density of width sigma, radial profile.
std::function<double(double)> gaussian_profile(double sigma);

struct RobinReport {
  bool admissible = false;
  double ac_imag = 0.0;    // |Im(conj(alpha) gamma)|
  double bd_imag = 0.0;    // |Im(conj(beta) delta)|
  double abcd_error = 0.0; // |conj(alpha) delta - conj(gamma) beta + 1|
};

/// Checks the three admissibility constraints to tolerance. Throws
/// AdmissibilityError for (alpha, beta) == (0, 0).
RobinReport robin_admissible(Complex alpha, Complex beta, Complex gamma,
                             Complex delta, double tol = 1e-12);

}  // namespace ibclab
