#include "ibclab/spectra.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ibclab/errors.hpp"

namespace ibclab {

namespace {

// deterministic start vector; mt19937_64 output is fixed by the standard
Eigen::VectorXd seeded_start(std::int64_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::VectorXd v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    double u = (gen() >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  double n = v.norm();
  if (n == 0.0) v[0] = 1.0, n = 1.0;
  return v / n;
}

void assert_real_coefficient(Complex alpha) {
  if (std::abs(alpha.imag()) > 1e-12 * std::max(1.0, std::abs(alpha.real())))
    throw Error(
        "lowest_eigenpairs: non-real Rayleigh coefficient, input not "
        "Hermitian");
}

SpectralResult dense_path(const SparseHermitian& a, int k) {
  const std::int64_t n = a.dim();
  const auto& w = a.space()->weights();
  Eigen::VectorXd sw = w.array().sqrt();

  SpectralResult res;
  res.method = "dense";
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : a.entries())
    g(e.row, e.col) += sw[e.row] * e.value / sw[e.col];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolver failed");

  for (int i = 0; i < k; ++i) {
    res.eigenvalues.push_back(es.eigenvalues()[i]);
    Eigen::VectorXcd x = es.eigenvectors().col(i);
    res.residuals.push_back((g * x - es.eigenvalues()[i] * x).norm());
    // back to operator coordinates
    Eigen::VectorXcd op = x.array() / sw.array().cast<Complex>();
    FockVector fv = FockVector::unflatten(a.space(), op);
    fv.scale(1.0 / fv.norm());
    res.eigenvectors.push_back(std::move(fv));
  }
  res.iterations = 1;
  return res;
}

// Thick-restart Lanczos with full reorthogonalization against the retained
// basis. `apply` is the (self-adjoint) iteration operator; when shift_invert
// is set it is (A - sigma)^-1 and eigenvalue selection flips accordingly.
// Convergence is decided on true residuals of A itself.
template <typename Scalar, typename Apply>
SpectralResult lanczos_path(const SparseHermitian& a, int k, double tol,
                            const SolverOptions& opts, Apply&& apply,
                            bool shift_invert, double sigma) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const std::int64_t dim = a.dim();
  const auto& w = a.space()->weights();
  Eigen::VectorXd sw = w.array().sqrt();

  const int m = static_cast<int>(
      opts.basis_size > 0
          ? std::min<std::int64_t>(opts.basis_size, dim)
          : std::min<std::int64_t>(std::max(2 * k + 28, 48), dim));
  if (k > m) throw ConfigError("lowest_eigenpairs: k exceeds basis size");

  // A-matvec in orthonormal coordinates, for true residual checks
  auto apply_a = [&](const Vec& x) -> Vec {
    if constexpr (std::is_same_v<Scalar, Complex>)
      return a.sym_complex() * x;
    else
      return a.sym_real() * x;
  };

  std::vector<Vec> basis;
  basis.reserve(m + 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  basis.push_back(seeded_start(dim, opts.seed).template cast<Scalar>());

  Vec pending;              // next Krylov direction once the basis is full
  double pending_beta = 0;  // its residual link
  int matvecs = 0;
  std::uint64_t reseed = 1;
  bool exhausted = false;

  auto orthogonalize = [&](Vec& x) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x -= b.dot(x) * b;
  };

  struct Ritz {
    Eigen::VectorXd values;   // iteration-operator eigenvalues, ascending
    Eigen::MatrixXd vectors;  // columns
  };

  std::vector<double> eigenvalues(k);
  std::vector<Vec> vectors(k);
  std::vector<double> residuals(k);

  while (true) {
    // grow the factorization; every basis vector gets its diagonal, the
    // direction that would overflow the basis is parked in `pending`
    while (!exhausted) {
      const int j = static_cast<int>(basis.size()) - 1;
      Vec av = apply(basis[j]);
      ++matvecs;
      Scalar alpha = basis[j].dot(av);
      if constexpr (std::is_same_v<Scalar, Complex>)
        assert_real_coefficient(alpha);
      t(j, j) = std::real(alpha);
      orthogonalize(av);
      double beta = av.norm();
      if (beta <= 1e-13) {
        // invariant subspace hit; continue in a fresh direction
        av = seeded_start(dim, opts.seed + 7919 * reseed++)
                 .template cast<Scalar>();
        orthogonalize(av);
        double nf = av.norm();
        if (nf <= 1e-10) {
          exhausted = true;
          break;
        }
        av /= nf;
        beta = 0.0;
      } else {
        av /= beta;
      }
      if (j + 1 < m) {
        t(j, j + 1) = t(j + 1, j) = beta;
        basis.push_back(std::move(av));
      } else {
        pending = std::move(av);
        pending_beta = beta;
        break;
      }
    }

    const int cur = static_cast<int>(basis.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        t.topLeftCorner(cur, cur));
    if (es.info() != Eigen::Success)
      throw ConvergenceError("lowest_eigenpairs: projected solve failed");
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& s = es.eigenvectors();

    const int avail = std::min(k, cur);
    // iteration-operator extremes mapping to the lowest eigenvalues of A
    auto pick = [&](int i) { return shift_invert ? cur - 1 - i : i; };

    bool all_converged = cur >= k;
    for (int i = 0; i < avail; ++i) {
      const int c = pick(i);
      Vec y = Vec::Zero(dim);
      for (int q = 0; q < cur; ++q) y += s(q, c) * basis[q];
      double ny = y.norm();
      if (ny == 0.0) {
        all_converged = false;
        break;
      }
      y /= ny;
      double lambda;
      if (shift_invert)
        lambda = theta[c] != 0.0 ? sigma + 1.0 / theta[c]
                                 : std::numeric_limits<double>::infinity();
      else
        lambda = theta[c];
      Vec r = apply_a(y);
      ++matvecs;
      // Rayleigh quotient sharpens the estimate in both modes
      Scalar rq = y.dot(r);
      if constexpr (std::is_same_v<Scalar, Complex>)
        assert_real_coefficient(rq);
      lambda = std::real(rq);
      r -= Scalar(lambda) * y;
      eigenvalues[i] = lambda;
      vectors[i] = std::move(y);
      residuals[i] = r.norm();
      if (residuals[i] > tol) all_converged = false;
    }

    if ((all_converged && cur >= k) || exhausted) break;
    if (matvecs >= opts.max_matvecs) {
      std::string msg = "lowest_eigenpairs: no convergence after " +
                        std::to_string(matvecs) + " matvecs; residuals:";
      for (int i = 0; i < avail; ++i)
        msg += " " + std::to_string(residuals[i]);
      throw ConvergenceError(msg);
    }

    // thick restart: keep the wanted extremes plus a buffer
    const int keep = std::min(cur - 2, k + std::max(8, k));
    std::vector<Vec> nb;
    nb.reserve(m + 1);
    for (int i = 0; i < keep; ++i) {
      const int c = pick(i);
      Vec y = Vec::Zero(dim);
      for (int q = 0; q < cur; ++q) y += s(q, c) * basis[q];
      nb.push_back(std::move(y));
    }
    t.setZero();
    for (int i = 0; i < keep; ++i) t(i, i) = theta[pick(i)];
    if (pending.size() == 0) {
      pending = seeded_start(dim, opts.seed + 7919 * reseed++)
                    .template cast<Scalar>();
      pending_beta = 0.0;
    }
    for (int i = 0; i < keep; ++i)
      t(i, keep) = t(keep, i) = pending_beta * s(cur - 1, pick(i));
    basis = std::move(nb);
    Vec x = std::move(pending);
    pending = Vec();
    pending_beta = 0.0;
    orthogonalize(x);
    double nx = x.norm();
    if (nx <= 1e-10) break;  // nothing left to explore; use current pairs
    basis.push_back(x / nx);
  }

  SpectralResult out;
  out.method = shift_invert ? "shift-invert-lanczos" : "lanczos";
  out.iterations = matvecs;

  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int p, int q) { return eigenvalues[p] < eigenvalues[q]; });
  for (int i : idx) {
    out.eigenvalues.push_back(eigenvalues[i]);
    out.residuals.push_back(residuals[i]);
    Eigen::VectorXcd yc;
    if constexpr (std::is_same_v<Scalar, Complex>)
      yc = vectors[i];
    else
      yc = vectors[i].template cast<Complex>();
    Eigen::VectorXcd op = yc.array() / sw.array().cast<Complex>();
    FockVector fv = FockVector::unflatten(a.space(), op);
    fv.scale(1.0 / fv.norm());
    out.eigenvectors.push_back(std::move(fv));
  }
  return out;
}

}  // namespace

SpectralResult lowest_eigenpairs(const SparseHermitian& a, int k, double tol,
                                 const SolverOptions& opts) {
  if (k < 1) throw ConfigError("lowest_eigenpairs: k must be >= 1");
  if (k > a.dim()) throw ConfigError("lowest_eigenpairs: k exceeds dimension");

  auto mode = opts.mode;
  if (mode == SolverOptions::Mode::Auto)
    mode = a.dim() <= opts.dense_threshold ? SolverOptions::Mode::Dense
                                           : SolverOptions::Mode::Lanczos;

  if (mode == SolverOptions::Mode::Dense) return dense_path(a, k);

  if (mode == SolverOptions::Mode::ShiftInvert) {
    if (!a.is_real())
      throw ConfigError("shift-invert path requires a real matrix");
    double sigma = opts.shift;
    if (sigma == 0.0) {
      // rough spectrum-bottom estimate, then shift safely below it
      SolverOptions est = opts;
      est.mode = SolverOptions::Mode::Lanczos;
      est.max_matvecs = 400;
      est.basis_size = 48;
      bool have_est = false;
      try {
        sigma = lowest_eigenpairs(a, 1, 1e-2, est).eigenvalues[0] - 1.0;
        have_est = true;
      } catch (const ConvergenceError&) {
      }
      if (!have_est) {
        // Gershgorin lower bound of the orthonormal form
        const auto& g = a.sym_real();
        double lo = 0.0;
        for (std::int64_t r = 0; r < g.rows(); ++r) {
          double diag = 0.0, off = 0.0;
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
                   it(g, r);
               it; ++it) {
            if (it.col() == r)
              diag = it.value();
            else
              off += std::abs(it.value());
          }
          lo = std::min(lo, diag - off);
        }
        sigma = lo - 1.0;
      }
    }
    Eigen::SparseMatrix<double> shifted = a.sym_real();
    Eigen::SparseMatrix<double> id(a.dim(), a.dim());
    id.setIdentity();
    shifted -= sigma * id;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success)
      throw ConvergenceError("shift-invert factorization failed");
    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return ldlt.solve(x);
    };
    return lanczos_path<double>(a, k, tol, opts, apply, true, sigma);
  }

  if (a.is_real()) {
    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return a.sym_real() * x;
    };
    return lanczos_path<double>(a, k, tol, opts, apply, false, 0.0);
  }
  auto apply = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    return a.sym_complex() * x;
  };
  return lanczos_path<Complex>(a, k, tol, opts, apply, false, 0.0);
}

RichardsonFit richardson_extrapolate(
    const std::vector<std::pair<double, double>>& samples,
    std::optional<double> fixed_order) {
  if (samples.size() < 3)
    throw ConfigError("richardson_extrapolate: need >= 3 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0))
      throw ConfigError("richardson_extrapolate: h must be positive");
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].first == samples[j].first)
        throw ConfigError("richardson_extrapolate: degenerate sample set");
  }

  auto fit_for_order = [&](double p) -> RichardsonFit {
    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = std::pow(samples[i].first, p);
      y[i] = samples[i].second;
    }
    Eigen::Vector2d c = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    RichardsonFit f;
    f.limit = c[0];
    f.coefficient = c[1];
    f.order = p;
    f.error_estimate =
        std::sqrt((x * c - y).squaredNorm() / std::max(1, n - 2));
    return f;
  };

  if (fixed_order) return fit_for_order(*fixed_order);

  RichardsonFit best;
  double best_res = std::numeric_limits<double>::infinity();
  for (double p = 0.25; p <= 4.0 + 1e-9; p += 0.005) {
    RichardsonFit f = fit_for_order(p);
    if (f.error_estimate < best_res) {
      best_res = f.error_estimate;
      best = f;
    }
  }
  return best;
}

}  // namespace ibclab
