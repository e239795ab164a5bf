#include "ibclab/oracles.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ibclab/errors.hpp"

namespace ibclab {

namespace {

constexpr double kPi = std::numbers::pi;

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double s,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double s2 = sl + sr;
  if (depth <= 0)
    throw ConvergenceError("van_hove_self_energy: quadrature non-convergence");
  if (std::abs(s2 - s) <= 15.0 * tol) return s2 + (s2 - s) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, sl, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, sr, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, s, tol, 48);
}

}  // namespace

GroundTruth exact_ground(const ModelParams& model) {
  if (!(model.e0 > 0.0)) throw ConfigError("exact_ground: e0 must be > 0");
  GroundTruth g;
  g.kappa = std::sqrt(2.0 * model.e0);
  g.e_min = model.g * model.g * g.kappa / (2.0 * kPi);
  g.lambda_mean = model.g * model.g / (2.0 * kPi * g.kappa);
  g.n_norm = std::exp(-0.5 * g.lambda_mean);
  return g;
}

CenterSet CenterSet::two(double separation) {
  CenterSet c;
  c.positions.push_back(Eigen::Vector3d(0, 0, 0));
  c.positions.push_back(Eigen::Vector3d(0, 0, separation));
  c.validate();
  return c;
}

void CenterSet::validate() const {
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if ((positions[i] - positions[j]).norm() < 1e-12)
        throw ConfigError("CenterSet: coincident centers");
}

double two_center_ground(const ModelParams& model, const CenterSet& centers) {
  if (!(model.e0 > 0.0))
    throw ConfigError("two_center_ground: e0 must be > 0");
  centers.validate();
  const double kappa = model.kappa();
  const int n = static_cast<int>(centers.positions.size());
  double pair_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = (centers.positions[i] - centers.positions[j]).norm();
      pair_sum += std::exp(-kappa * r) / r;
    }
  return model.g * model.g / kPi * (n * kappa / 2.0 - pair_sum);
}

double yukawa_pair_potential(const ModelParams& model, double r) {
  if (!(r > 0.0)) throw ConfigError("yukawa_pair_potential: R must be > 0");
  return -model.g * model.g / kPi * std::exp(-model.kappa() * r) / r;
}

namespace {

// sum over centers of exp(-kappa |y - x_i|)/|y - x_i|
double cloud(const CenterSet& centers, double kappa,
             const Eigen::Vector3d& y) {
  double s = 0.0;
  for (const auto& x : centers.positions) {
    const double d = (y - x).norm();
    if (d < 1e-8)
      throw Error("ibc_residual_multicenter: sample too close to a center");
    s += std::exp(-kappa * d) / d;
  }
  return s;
}

}  // namespace

MulticenterResidual ibc_residual_multicenter(
    const ModelParams& model, const CenterSet& centers,
    const std::vector<std::vector<Eigen::Vector3d>>& samples,
    std::uint64_t direction_seed) {
  if (!(model.e0 > 0.0))
    throw ConfigError("ibc_residual_multicenter: e0 must be > 0");
  centers.validate();
  const double kappa = model.kappa();
  const double energy = two_center_ground(model, centers);

  // deterministic unit directions for the radial limits
  std::mt19937_64 gen(direction_seed);
  auto unit = [&gen]() { return (gen() >> 11) * 0x1.0p-53; };
  auto direction = [&]() {
    while (true) {
      Eigen::Vector3d d(2.0 * unit() - 1.0, 2.0 * unit() - 1.0,
                        2.0 * unit() - 1.0);
      const double n = d.norm();
      if (n > 0.1 && n <= 1.0) return Eigen::Vector3d(d / n);
    }
  };

  // c_{n+1}/c_n from the boundary condition; c_0 = 1
  auto c_ratio = [&](int n) { return -model.g / (2.0 * kPi * std::sqrt(n + 1.0)); };

  MulticenterResidual res;
  for (const auto& sample : samples) {
    const int n = static_cast<int>(sample.size());
    double c_n = 1.0;
    for (int j = 0; j < n; ++j) c_n *= c_ratio(j);

    double prod = 1.0;  // prod_j cloud(y_j)
    for (const auto& y : sample) prod *= cloud(centers, kappa, y);
    const double psi_n = c_n * prod;
    const double c_up = c_n * c_ratio(n);

    double creation = 0.0;  // sum_i of the omega-averaged radial derivative
    for (const auto& x : centers.positions) {
      const int n_dirs = 2;
      for (int d = 0; d < n_dirs; ++d) {
        const Eigen::Vector3d omega = direction();
        auto q = [&](double r) {
          // r * psi^(n+1)(sample, x + r omega); the self-center distance is
          // exactly r, so its 1/r pole cancels analytically and the tiny-r
          // evaluation stays well conditioned
          double others = 0.0;
          for (const auto& xi : centers.positions) {
            if (&xi == &x) continue;
            const double dist = (x - xi + r * omega).norm();
            others += std::exp(-kappa * dist) / dist;
          }
          return c_up * prod * (std::exp(-kappa * r) + r * others);
        };
        const double r0 = 1e-5;
        const double q1 = q(r0), q2 = q(0.5 * r0), q3 = q(0.25 * r0);
        const double limit = 2.0 * q3 - q2;  // Richardson, O(r0^2)
        const double rhs =
            -model.g / (2.0 * kPi * std::sqrt(n + 1.0)) * psi_n;
        res.ibc = std::max(res.ibc, std::abs(limit - rhs));
        // second-order boundary slope of r psi from divided differences
        const double s1 = (q1 - q2) / (0.5 * r0);
        const double s2 = (q2 - q3) / (0.25 * r0);
        creation += (2.0 * s2 - s1) / double(n_dirs);
      }
    }
    // kinetic term is analytic here: each cloud factor satisfies
    // laplacian = kappa^2 * cloud away from the centers
    const double kinetic = -0.5 * kappa * kappa * n * psi_n;
    const double mass = n * model.e0 * psi_n;
    const double lhs =
        kinetic + mass + model.g * std::sqrt(n + 1.0) * creation;
    res.eigen_eq = std::max(res.eigen_eq, std::abs(lhs - energy * psi_n));
  }
  return res;
}

std::vector<std::vector<Eigen::Vector3d>> draw_multicenter_samples(
    const CenterSet& centers, int n_top, int count, std::uint64_t seed,
    double min_dist, double box_radius) {
  centers.validate();
  Eigen::Vector3d mid = Eigen::Vector3d::Zero();
  for (const auto& x : centers.positions) mid += x;
  mid /= double(centers.positions.size());

  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() { return (gen() >> 11) * 0x1.0p-53; };

  std::vector<std::vector<Eigen::Vector3d>> out;
  out.reserve(count);
  int size_cycle = 0;
  while (static_cast<int>(out.size()) < count) {
    const int n = size_cycle % (n_top + 1);
    ++size_cycle;
    std::vector<Eigen::Vector3d> cfg;
    while (static_cast<int>(cfg.size()) < n) {
      Eigen::Vector3d y =
          mid + box_radius * Eigen::Vector3d(2.0 * uniform() - 1.0,
                                             2.0 * uniform() - 1.0,
                                             2.0 * uniform() - 1.0);
      bool ok = true;
      for (const auto& x : centers.positions)
        if ((y - x).norm() < min_dist) ok = false;
      if (ok) cfg.push_back(y);
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

double van_hove_self_energy(const ModelParams& model, double sigma) {
  if (!(sigma > 0.0))
    throw ConfigError("van_hove_self_energy: sigma must be > 0");
  if (!(model.e0 > 0.0))
    throw ConfigError("van_hove_self_energy: e0 must be > 0");
  const double kappa2 = 2.0 * model.e0;
  auto integrand = [&](double k) {
    return k * k * std::exp(-sigma * sigma * k * k) / (k * k + kappa2);
  };
  const double kmax = std::sqrt(60.0) / sigma;
  const double scale = std::max(1.0, 1.0 / sigma);
  const double integral = integrate(integrand, 0.0, kmax, 1e-14 * scale);
  return -model.g * model.g / (kPi * kPi) * integral;
}

double renorm_constant(const ModelParams& model) {
  return model.g * model.g * std::sqrt(model.e0) / (4.0 * kPi);
}

}  // namespace ibclab
