#include "ibclab/evolve.hpp"

#include <cmath>
#include <limits>

#include "ibclab/errors.hpp"

namespace ibclab {

namespace {

// sector-coupling entries of W^(1/2) A W^(-1/2) between n-1 and n, kept as
// (row in n-1, col in n, value) for the flux functional
struct CouplingBlock {
  std::vector<std::int64_t> row, col;
  std::vector<Complex> val;
};

std::vector<CouplingBlock> coupling_blocks(const SparseHermitian& a) {
  const auto& sp = *a.space();
  const auto& w = sp.weights();
  std::vector<CouplingBlock> blocks(sp.n_max() + 1);
  for (const auto& e : a.entries()) {
    const int nr = sp.sector_of(e.row);
    const int nc = sp.sector_of(e.col);
    if (nc != nr + 1) continue;
    auto& b = blocks[nc];
    b.row.push_back(e.row);
    b.col.push_back(e.col);
    // value in orthonormal coordinates
    b.val.push_back(std::sqrt(w[e.row]) * e.value / std::sqrt(w[e.col]));
  }
  return blocks;
}

// flux[n] = 2 Im <x^(n-1), C x^(n)> in orthonormal coordinates
std::vector<double> fluxes(const std::vector<CouplingBlock>& blocks,
                           const Eigen::VectorXcd& x) {
  std::vector<double> f(blocks.size(), 0.0);
  for (std::size_t n = 1; n < blocks.size(); ++n) {
    const auto& b = blocks[n];
    Complex s = 0.0;
    for (std::size_t k = 0; k < b.val.size(); ++k)
      s += std::conj(x[b.row[k]]) * b.val[k] * x[b.col[k]];
    f[n] = 2.0 * s.imag();
  }
  return f;
}

std::vector<double> sector_norms(const FockSpace& sp,
                                 const Eigen::VectorXcd& x) {
  std::vector<double> p(sp.n_max() + 1, 0.0);
  for (int n = 0; n <= sp.n_max(); ++n)
    p[n] = x.segment(sp.sector_offset(n), sp.sector_dim(n)).squaredNorm();
  return p;
}

}  // namespace

Trajectory propagate(const SparseHermitian& a, const FockVector& v0,
                     double dt, int steps, const PropagateOptions& opts) {
  if (!(dt > 0.0)) throw ConfigError("propagate: dt must be positive");
  if (steps < 1) throw ConfigError("propagate: steps must be >= 1");
  if (!v0.space()->same_layout(*a.space()))
    throw ShapeError("propagate: state/operator basis mismatch");
  if (v0.norm2() == 0.0) throw ConfigError("propagate: v0 must be nonzero");

  const auto& sp = *a.space();
  const std::int64_t dim = sp.dim();
  const auto& w = sp.weights();
  Eigen::VectorXd sw = w.array().sqrt();

  // work in orthonormal coordinates x = W^(1/2) v
  Eigen::VectorXcd x = v0.flatten().array() * sw.array().cast<Complex>();

  const double tau = 0.5 * dt;
  auto apply_sym = [&](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    if (a.is_real()) {
      const auto& g = a.sym_real();
      Eigen::VectorXcd out(dim);
      out.real() = g * y.real();
      out.imag() = g * y.imag();
      return out;
    }
    return a.sym_complex() * y;
  };
  const Complex itau(0.0, tau);

  auto blocks = coupling_blocks(a);

  Trajectory traj;
  traj.dt = dt;
  auto snapshot = [&](double t) {
    Eigen::VectorXcd v = x.array() / sw.array().cast<Complex>();
    traj.times.push_back(t);
    traj.snapshots.push_back(FockVector::unflatten(a.space(), v));
    traj.sector_weights.push_back(sector_norms(sp, x));
    traj.flux.push_back(fluxes(blocks, x));
    traj.energy.push_back(std::real(x.dot(apply_sym(x))));
  };
  snapshot(0.0);

  // CG on the normal equations N y = (I - i tau A)^2-ish rhs with
  // N = I + tau^2 A^2; sigma_min(I + i tau A) >= 1 so the normal residual
  // bounds the true one
  auto apply_n = [&](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return y + tau * tau * apply_sym(apply_sym(y));
  };

  for (int step = 1; step <= steps; ++step) {
    Eigen::VectorXcd ax = apply_sym(x);
    Eigen::VectorXcd b = x - itau * ax;
    Eigen::VectorXcd rhs = b - itau * apply_sym(b);  // (I - i tau A) b
    const double target = opts.tol * b.norm();

    // warm start from the previous state
    Eigen::VectorXcd y = x;
    Eigen::VectorXcd r = rhs - apply_n(y);
    Eigen::VectorXcd p = r;
    double rho = r.squaredNorm();
    int it = 0;
    while (std::sqrt(rho) > target) {
      if (++it > opts.max_cg_iterations)
        throw ConvergenceError(
            "propagate: linear solve stalled at residual " +
            std::to_string(std::sqrt(rho)));
      Eigen::VectorXcd np = apply_n(p);
      Complex denom = p.dot(np);
      Complex alpha = rho / denom;
      y += alpha * p;
      r -= alpha * np;
      double rho_new = r.squaredNorm();
      p = r + (rho_new / rho) * p;
      rho = rho_new;
      if (it % 50 == 0) {  // guard against drift in the recurrence
        r = rhs - apply_n(y);
        rho = r.squaredNorm();
        p = r;
      }
    }
    x = std::move(y);
    if (step % opts.snapshot_every == 0 || step == steps)
      snapshot(step * dt);
  }
  return traj;
}

std::vector<std::vector<double>> flux_balance_residual(
    const Trajectory& traj) {
  const std::size_t count = traj.times.size();
  if (count < 3)
    throw ConfigError("flux_balance_residual: need >= 3 snapshots");
  const int n_max = static_cast<int>(traj.sector_weights[0].size()) - 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::vector<double>> res(
      count, std::vector<double>(std::max(n_max, 0), nan));
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double dt2 = traj.times[i + 1] - traj.times[i - 1];
    for (int n = 0; n < n_max; ++n) {
      const double dpdt =
          (traj.sector_weights[i + 1][n] - traj.sector_weights[i - 1][n]) /
          dt2;
      const double inflow = traj.flux[i][n + 1];
      const double outflow = n >= 1 ? traj.flux[i][n] : 0.0;
      res[i][n] = std::abs(dpdt - inflow + outflow);
    }
  }
  return res;
}

}  // namespace ibclab
