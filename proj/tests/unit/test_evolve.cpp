#include <doctest.h>

#include <cmath>

#include "ibclab/assemble.hpp"
#include "ibclab/evolve.hpp"
#include "ibclab/spectra.hpp"

using namespace ibclab;

namespace {

FockSpacePtr space_of(int m, int n_max, double h) {
  return FockSpace::build(RadialGrid{h, m, 0.0}, n_max);
}

double norm2_at(const Trajectory& t, std::size_t i) {
  double s = 0.0;
  for (double p : t.sector_weights[i]) s += p;
  return s;
}

}  // namespace

TEST_CASE("free evolution conserves the norm over 1000 steps") {
  ModelParams model{0.0, 1.0, 1};
  auto sp = space_of(60, 1, 0.15);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  FockVector v0 = product_state_from_profile(
      sp, [](double r) { return std::exp(-(r - 3.0) * (r - 3.0)); },
      {0.0, 1.0});
  v0.scale(1.0 / v0.norm());
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 100;
  Trajectory t = propagate(a, v0, 0.01, 1000, opts);
  for (std::size_t i = 0; i < t.times.size(); ++i)
    CHECK(std::abs(norm2_at(t, i) - 1.0) <= 1e-10);
}

TEST_CASE("eigenvector evolves by a pure phase") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = space_of(40, 2, 0.25);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  auto res = lowest_eigenpairs(a, 1, 1e-12);
  const double e = res.eigenvalues[0];
  const FockVector& v0 = res.eigenvectors[0];

  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 100;
  const double dt = 0.01;
  Trajectory t = propagate(a, v0, dt, 100, opts);
  const FockVector& vt = t.snapshots.back();

  // Crank-Nicolson advances an eigenvector by the Cayley phase of e
  const double theta = -2.0 * std::atan2(0.5 * dt * e, 1.0) * 100;
  Complex expect = std::polar(1.0, theta);
  Complex overlap = inner_product(v0, vt);
  CHECK(std::abs(overlap - expect) <= 1e-8);
  CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-10);
}

TEST_CASE("vacuum initial state grows a one-boson cloud, norm conserved") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = space_of(50, 2, 0.22);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 20;
  Trajectory t = propagate(a, vacuum_state(sp), 0.01, 400, opts);
  CHECK(t.sector_weights.back()[1] > 1e-4);
  for (std::size_t i = 0; i < t.times.size(); ++i)
    CHECK(std::abs(norm2_at(t, i) - 1.0) <= 1e-10);
  // energy stays on its initial value
  for (double e : t.energy)
    CHECK(std::abs(e - t.energy.front()) <= 1e-8);
}

TEST_CASE("flux balance: free model has no boundary flux") {
  ModelParams model{0.0, 1.0, 2};
  auto sp = space_of(30, 2, 0.3);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  FockVector v0 = product_state_from_profile(
      sp, [](double r) { return std::exp(-(r - 2.0) * (r - 2.0)); },
      {0.3, 0.8, 0.2});
  v0.scale(1.0 / v0.norm());
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 5;
  Trajectory t = propagate(a, v0, 0.02, 50, opts);
  auto res = flux_balance_residual(t);
  for (std::size_t i = 0; i < t.times.size(); ++i)
    for (int n = 1; n <= 2; ++n) CHECK(std::abs(t.flux[i][n]) <= 1e-14);
  for (std::size_t i = 1; i + 1 < res.size(); ++i)
    for (double r : res[i]) CHECK(r <= 1e-10);
}

TEST_CASE("flux balance: stationary state has vanishing residual") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = space_of(40, 2, 0.25);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  auto res = lowest_eigenpairs(a, 1, 1e-12);
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 2;
  Trajectory t = propagate(a, res.eigenvectors[0], 0.01, 20, opts);
  auto r = flux_balance_residual(t);
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    for (double v : r[i]) CHECK(v <= 1e-8);
}

TEST_CASE("signed inter-sector transfers sum to zero") {
  ModelParams model{1.0, 1.0, 2};
  auto sp = space_of(40, 2, 0.25);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 10;
  Trajectory t = propagate(a, vacuum_state(sp), 0.01, 100, opts);
  // d/dt of the total norm is the telescoped sum of all transfers; with
  // every sector included the snapshots must hold the total fixed
  for (std::size_t i = 1; i + 1 < t.times.size(); ++i) {
    const double dnorm =
        (norm2_at(t, i + 1) - norm2_at(t, i - 1)) /
        (t.times[i + 1] - t.times[i - 1]);
    CHECK(std::abs(dnorm) <= 1e-10);
  }
}

TEST_CASE("flux matches the trace formula on the dirichlet boundary") {
  // 2 Im <v^(n-1), C v^(n)> equals -(n) Im[conj(T) D] summed with the
  // discrete measure, T = c_{n-1} v^(n-1), D the one-sided derivative
  ModelParams model{1.0, 1.0, 2};
  auto sp = space_of(25, 2, 0.3);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  PropagateOptions opts;
  opts.tol = 1e-13;
  opts.snapshot_every = 7;
  Trajectory t = propagate(a, vacuum_state(sp), 0.01, 35, opts);

  const double h = sp->grid().h;
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    const FockVector& v = t.snapshots[i];
    for (int n = 1; n <= 2; ++n) {
      const double c = dirichlet_boundary_constant(model.g, n - 1);
      const auto& blo = sp->basis(n - 1);
      const auto& bhi = sp->basis(n);
      double flux = 0.0;
      const double measure = std::pow(h, n - 1);
      for (std::int64_t q = 0; q < blo.size(); ++q) {
        Complex w = v.sector(n - 1)[q];
        Complex v1 = v.sector(n)[bhi.rank_with_inserted(blo, q, 1)];
        Complex trace = c * w;
        Complex deriv = (v1 - trace) / h;
        flux -= double(n) * measure * blo.weight(q) *
                std::imag(std::conj(trace) * deriv);
      }
      CHECK(flux == doctest::Approx(t.flux[i][n]).epsilon(1e-10));
    }
  }
}

TEST_CASE("propagate rejects bad inputs") {
  ModelParams model{1.0, 1.0, 1};
  auto sp = space_of(10, 1, 0.3);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), sp);
  FockVector zero(sp);
  CHECK_THROWS_AS(propagate(a, zero, 0.01, 10), ConfigError);
  CHECK_THROWS_AS(propagate(a, vacuum_state(sp), -0.01, 10), ConfigError);
  Trajectory t = propagate(a, vacuum_state(sp), 0.01, 2,
                           PropagateOptions{1e-12, 1, 10000});
  CHECK_THROWS_AS(flux_balance_residual(Trajectory{}), ConfigError);
}
