#pragma once

#include <cmath>

#include "ibclab/errors.hpp"

namespace ibclab {

/// Physical constants of the fixed-source model in natural units
/// (hbar = m_y = 1). g is the coupling of the source, e0 the rest
/// energy of one boson, n_max the boson-number truncation.
struct ModelParams {
  double g = 1.0;
  double e0 = 1.0;
  int n_max = 2;

  static constexpr double m_y = 1.0;
  static constexpr double hbar = 1.0;

  /// Decay rate sqrt(2 m_y e0)/hbar of the dressed cloud.
  double kappa() const { return std::sqrt(2.0 * e0); }

  void validate() const {
    if (!(e0 > 0.0)) throw ConfigError("ModelParams: e0 must be positive");
    if (n_max < 0) throw ConfigError("ModelParams: n_max must be >= 0");
    if (g != 0.0 && n_max < 1)
      throw ConfigError("ModelParams: interacting model needs n_max >= 1");
  }
};

/// Uniform radial grid. Free nodes k = 1..m sit at r_min + k*h; node 0 at
/// r_min is the constrained boundary node, node m+1 carries the far-end zero.
struct RadialGrid {
  double h = 0.1;
  int m = 10;
  double r_min = 0.0;

  double node(int k) const { return r_min + k * h; }
  double r_box() const { return r_min + (m + 1) * h; }

  void validate() const {
    if (!(h > 0.0)) throw ConfigError("RadialGrid: h must be positive");
    if (m < 1) throw ConfigError("RadialGrid: m must be >= 1");
    if (r_min < 0.0) throw ConfigError("RadialGrid: r_min must be >= 0");
  }
};

}  // namespace ibclab
