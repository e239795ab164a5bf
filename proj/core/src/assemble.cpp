#include "ibclab/assemble.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace ibclab {

namespace {

constexpr double kPi = std::numbers::pi;

// Reduced-coordinate constants for the sector pair (n, n+1):
//   boundary scale  s_n  = 4 sqrt(pi) / sqrt(n+1)   (alpha T + beta D = s_n w)
//   creation scale  k_c  = 2 sqrt(pi) sqrt(n+1)     (row_n += k_c (gamma T + delta D))
double s_rhs(int n) { return 4.0 * std::sqrt(kPi) / std::sqrt(n + 1.0); }
double k_creation(int n) { return 2.0 * std::sqrt(kPi) * std::sqrt(n + 1.0); }

struct Accumulator {
  const FockSpace& sp;
  std::vector<SparseEntry> out;

  explicit Accumulator(const FockSpace& s) : sp(s) {}

  void op(std::int64_t row, std::int64_t col, Complex v) {
    out.push_back({static_cast<std::int32_t>(row),
                   static_cast<std::int32_t>(col), v});
  }
  // form-matrix contribution S_xy: operator rows get S / w_row
  void form(std::int64_t x, std::int64_t y, double s) {
    op(x, y, s / sp.weights()[x]);
    if (x != y) op(y, x, s / sp.weights()[y]);
  }
};

// nondecreasing (n-1)-tuple enumerator over {1..m}; the "other coordinates"
// of one sector-n coordinate line
struct OthersIter {
  std::vector<std::uint16_t> cur;
  int m = 0;
  bool done = false;

  OthersIter(int count, int m_nodes) : cur(count, 1), m(m_nodes) {}
  bool next() {
    int j = static_cast<int>(cur.size()) - 1;
    while (j >= 0 && cur[j] == m) --j;
    if (j < 0) return false;
    ++cur[j];
    for (std::size_t i = j + 1; i < cur.size(); ++i) cur[i] = cur[j];
    return true;
  }
};

double multiplicity(std::span<const std::uint16_t> e) {
  double w = 1.0;
  int run = 0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    run = (j > 0 && e[j] == e[j - 1]) ? run + 1 : 1;
    w *= double(j + 1) / double(run);
  }
  return w;
}

// rank of others-tuple with node k inserted, in the sector-n basis
std::int64_t rank_inserted(const SectorBasis& basis,
                           const std::vector<std::uint16_t>& others, int k) {
  std::uint16_t buf[64];
  const int n = basis.n();
  int pos = 0;
  while (pos < n - 1 && others[pos] < k) {
    buf[pos] = others[pos];
    ++pos;
  }
  buf[pos] = static_cast<std::uint16_t>(k);
  for (int j = pos; j < n - 1; ++j) buf[j + 1] = others[j];
  return basis.rank({buf, static_cast<std::size_t>(n)});
}

// Quadratic-form kinetic sum for every sector: edges (k, k+1) along one
// coordinate with the other coordinates fixed. boundary_cross decides what
// the k=0 edge does: for the IBC form it is |v(1) - c v_lower|^2, for the
// smeared model v(0) = 0 so it is |v(1)|^2.
enum class BoundaryKind { IbcConstraint, ZeroValue };

void accumulate_kinetic_form(Accumulator& acc, const ModelParams& model,
                             BoundaryKind bkind) {
  const FockSpace& sp = acc.sp;
  const double h = sp.grid().h;
  for (int n = 1; n <= sp.n_max(); ++n) {
    const SectorBasis& bn = sp.basis(n);
    const SectorBasis& blo = sp.basis(n - 1);
    const int mn = bn.m_nodes();
    const double c = dirichlet_boundary_constant(model.g, n - 1);
    const double coef_base = n * std::pow(h, n - 2) / 2.0;
    const std::int64_t off_n = sp.sector_offset(n);
    const std::int64_t off_lo = sp.sector_offset(n - 1);

    OthersIter it(n - 1, mn);
    do {
      const double coef = coef_base * multiplicity(
          {it.cur.data(), it.cur.size()});
      std::int64_t prev = off_n + rank_inserted(bn, it.cur, 1);

      if (bkind == BoundaryKind::IbcConstraint) {
        // (1/2h) |v(1) - c v_lower|^2
        const std::int64_t lo = off_lo + blo.rank(
            {it.cur.data(), it.cur.size()});
        acc.form(prev, prev, coef);
        if (c != 0.0) {
          acc.form(prev, lo, -coef * c);
          acc.form(lo, lo, coef * c * c);
        }
      } else {
        acc.form(prev, prev, coef);
      }

      for (int k = 1; k < mn; ++k) {
        const std::int64_t next = off_n + rank_inserted(bn, it.cur, k + 1);
        acc.form(prev, prev, coef);
        acc.form(next, next, coef);
        acc.form(prev, next, -coef);
        prev = next;
      }
      acc.form(prev, prev, coef);  // far-end zero edge
    } while (it.next());
  }
}

void accumulate_mass_form(Accumulator& acc, const ModelParams& model) {
  const FockSpace& sp = acc.sp;
  for (int n = 1; n <= sp.n_max(); ++n) {
    const std::int64_t off = sp.sector_offset(n);
    for (std::int64_t i = 0; i < sp.sector_dim(n); ++i)
      acc.op(off + i, off + i, n * model.e0);
  }
}

SparseHermitian assemble_dirichlet_form(const ModelParams& model,
                                        const FockSpacePtr& space) {
  Accumulator acc(*space);
  accumulate_kinetic_form(acc, model, BoundaryKind::IbcConstraint);
  accumulate_mass_form(acc, model);
  return SparseHermitian(space, std::move(acc.out));
}

// interior kinetic rows shared by the Neumann/Robin operator assemblies;
// the node-1 rows reference the eliminated trace T = mu v(1) + nu w
void accumulate_kinetic_rows(Accumulator& acc, const ModelParams& model,
                             const std::vector<Complex>& mu,
                             const std::vector<Complex>& nu) {
  const FockSpace& sp = acc.sp;
  const double h = sp.grid().h;
  const double inv2h2 = 1.0 / (2.0 * h * h);
  std::vector<std::uint16_t> buf;
  for (int n = 1; n <= sp.n_max(); ++n) {
    const SectorBasis& bn = sp.basis(n);
    const SectorBasis& blo = sp.basis(n - 1);
    const int mn = bn.m_nodes();
    const std::int64_t off_n = sp.sector_offset(n);
    const std::int64_t off_lo = sp.sector_offset(n - 1);
    for (std::int64_t i = 0; i < bn.size(); ++i) {
      const auto e = bn.entry(i);
      const std::int64_t row = off_n + i;
      acc.op(row, row, n * model.e0);
      int j = 0;
      while (j < n) {
        int j2 = j;
        while (j2 + 1 < n && e[j2 + 1] == e[j]) ++j2;
        const int count = j2 - j + 1;
        const int p = e[j];
        // neighbor p+1
        if (p + 1 <= mn) {
          buf.assign(e.begin(), e.end());
          buf[j2] = static_cast<std::uint16_t>(p + 1);
          acc.op(row, off_n + bn.rank({buf.data(), buf.size()}),
                 -count * inv2h2);
        }
        if (p > 1) {
          buf.assign(e.begin(), e.end());
          buf[j] = static_cast<std::uint16_t>(p - 1);
          acc.op(row, off_n + bn.rank({buf.data(), buf.size()}),
                 -count * inv2h2);
          acc.op(row, row, 2.0 * count * inv2h2);
        } else {
          // boundary coordinate: v(0) -> mu v(this) + nu w
          buf.assign(e.begin() + 1, e.end());
          const std::int64_t lo = off_lo + blo.rank({buf.data(), buf.size()});
          acc.op(row, row, (2.0 - mu[n - 1]) * (count * inv2h2));
          acc.op(row, lo, -nu[n - 1] * (count * inv2h2));
        }
        j = j2 + 1;
      }
    }
  }
}

// creation rows: sector n gets k_c (gamma T + delta D) from sector n+1
void accumulate_creation_rows(Accumulator& acc, Complex gamma, Complex delta,
                              const std::vector<Complex>& mu,
                              const std::vector<Complex>& nu) {
  const FockSpace& sp = acc.sp;
  const double h = sp.grid().h;
  for (int n = 0; n < sp.n_max(); ++n) {
    const SectorBasis& bn = sp.basis(n);
    const SectorBasis& bup = sp.basis(n + 1);
    const int m_up = bup.m_nodes();
    const std::int64_t off_n = sp.sector_offset(n);
    const std::int64_t off_up = sp.sector_offset(n + 1);
    const double kc = k_creation(n);
    const Complex up_coef = kc * (gamma * mu[n] + delta * (1.0 - mu[n]) / h);
    const Complex diag_coef = kc * nu[n] * (gamma - delta / h);
    for (std::int64_t i = 0; i < bn.size(); ++i) {
      const auto e = bn.entry(i);
      if (n > 0 && e[n - 1] > m_up) continue;  // no partner config above
      const std::int64_t up = off_up + bup.rank_with_inserted(bn, i, 1);
      acc.op(off_n + i, up, up_coef);
      acc.op(off_n + i, off_n + i, diag_coef);
    }
  }
}

SparseHermitian assemble_neumann(const ModelParams& model,
                                 const FockSpacePtr& space) {
  // trace elimination from d/dr(r psi) form: T = v(1) + h c_n w, and the
  // creation term is (g sqrt(n+1) / 2 sqrt(pi)) T
  const FockSpace& sp = *space;
  const double h = sp.grid().h;
  std::vector<Complex> mu(sp.n_max() + 1, 1.0), nu(sp.n_max() + 1, 0.0);
  for (int n = 0; n <= sp.n_max(); ++n)
    nu[n] = h * dirichlet_boundary_constant(model.g, n);

  Accumulator acc(sp);
  accumulate_kinetic_rows(acc, model, mu, nu);

  for (int n = 0; n < sp.n_max(); ++n) {
    const SectorBasis& bn = sp.basis(n);
    const SectorBasis& bup = sp.basis(n + 1);
    const int m_up = bup.m_nodes();
    const double k_half =
        model.g * std::sqrt(n + 1.0) / (2.0 * std::sqrt(kPi));
    const std::int64_t off_n = sp.sector_offset(n);
    const std::int64_t off_up = sp.sector_offset(n + 1);
    const double diag = k_half * h * dirichlet_boundary_constant(model.g, n);
    for (std::int64_t i = 0; i < bn.size(); ++i) {
      const auto e = bn.entry(i);
      if (n > 0 && e[n - 1] > m_up) continue;
      acc.op(off_n + i, off_up + bup.rank_with_inserted(bn, i, 1), k_half);
      acc.op(off_n + i, off_n + i, diag);
    }
  }
  return SparseHermitian(space, std::move(acc.out));
}

SparseHermitian assemble_robin(const ModelParams& model, const IbcSpec& spec,
                               const FockSpacePtr& space) {
  if (spec.alpha == 0.0 && spec.beta == 0.0)
    throw AdmissibilityError("assemble_ibc: (alpha, beta) must not be (0,0)");
  if (spec.enforce_admissibility) {
    auto rep = robin_admissible(spec.alpha, spec.beta, spec.gamma, spec.delta);
    if (!rep.admissible)
      throw AdmissibilityError("assemble_ibc: inadmissible Robin coefficients");
  }
  const FockSpace& sp = *space;
  const double h = sp.grid().h;
  const Complex denom = spec.alpha - spec.beta / h;
  if (std::abs(denom) <
      1e-12 * (std::abs(spec.alpha) + std::abs(spec.beta) / h))
    throw Error("assemble_ibc: Robin trace elimination singular at this h");

  std::vector<Complex> mu(sp.n_max() + 1), nu(sp.n_max() + 1);
  for (int n = 0; n <= sp.n_max(); ++n) {
    mu[n] = -(spec.beta / h) / denom;
    nu[n] = s_rhs(n) / denom;
  }

  Accumulator acc(sp);
  accumulate_kinetic_rows(acc, model, mu, nu);
  accumulate_creation_rows(acc, spec.gamma, spec.delta, mu, nu);
  return SparseHermitian(space, std::move(acc.out));
}

}  // namespace

double dirichlet_boundary_constant(double g, int n) {
  return -g / (std::sqrt(kPi) * std::sqrt(n + 1.0));
}

IbcSpec IbcSpec::robin_dirichlet_map(double g) {
  if (g == 0.0) throw ConfigError("robin_dirichlet_map: needs g != 0");
  return robin(-4.0 * kPi / g, 0.0, 0.0, g / (4.0 * kPi));
}

IbcSpec IbcSpec::robin_neumann_map(double g) {
  if (g == 0.0) throw ConfigError("robin_neumann_map: needs g != 0");
  return robin(0.0, 4.0 * kPi / g, g / (4.0 * kPi), 0.0);
}

std::function<double(double)> gaussian_profile(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_profile: sigma must be > 0");
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -1.5);
  return [norm, sigma](double r) {
    return norm * std::exp(-r * r / (2.0 * sigma * sigma));
  };
}

RobinReport robin_admissible(Complex alpha, Complex beta, Complex gamma,
                             Complex delta, double tol) {
  if (alpha == 0.0 && beta == 0.0)
    throw AdmissibilityError("robin_admissible: (alpha, beta) = (0, 0)");
  RobinReport rep;
  rep.ac_imag = std::abs(std::imag(std::conj(alpha) * gamma));
  rep.bd_imag = std::abs(std::imag(std::conj(beta) * delta));
  rep.abcd_error =
      std::abs(std::conj(alpha) * delta - std::conj(gamma) * beta + 1.0);
  rep.admissible =
      rep.ac_imag <= tol && rep.bd_imag <= tol && rep.abcd_error <= tol;
  return rep;
}

SparseHermitian assemble_ibc(const ModelParams& model, const IbcSpec& spec,
                             const FockSpacePtr& space) {
  if (space->grid().r_min != 0.0)
    throw ConfigError("assemble_ibc: grid.r_min must be 0");
  if (model.g != 0.0 && space->n_max() < 1)
    throw ConfigError("assemble_ibc: interacting model needs n_max >= 1");
  switch (spec.kind) {
    case IbcSpec::Kind::Dirichlet:
      return assemble_dirichlet_form(model, space);
    case IbcSpec::Kind::Neumann:
      return assemble_neumann(model, space);
    case IbcSpec::Kind::Robin:
      return assemble_robin(model, spec, space);
  }
  throw ConfigError("assemble_ibc: unknown kind");
}

SparseHermitian assemble_shell(const ModelParams& model, double delta_shell,
                               const FockSpacePtr& space) {
  const auto& grid = space->grid();
  if (delta_shell < grid.h * (1.0 - 1e-12))
    throw ConfigError("assemble_shell: delta_shell must be >= h");
  if (std::abs(grid.r_min - delta_shell) > 1e-12 * std::max(1.0, delta_shell))
    throw ConfigError("assemble_shell: grid.r_min must equal delta_shell");
  return assemble_dirichlet_form(model, space);
}

SparseHermitian assemble_smeared(const ModelParams& model,
                                 const std::function<double(double)>& phi,
                                 const FockSpacePtr& space) {
  if (space->grid().r_min != 0.0)
    throw ConfigError("assemble_smeared: grid.r_min must be 0");
  const FockSpace& sp = *space;
  const double h = sp.grid().h;

  Accumulator acc(sp);
  accumulate_kinetic_form(acc, model, BoundaryKind::ZeroValue);
  accumulate_mass_form(acc, model);

  // creation/annihilation through the radial kernel sqrt(4 pi) r phi(r);
  // entries below 1e-16 of the peak are dropped (well under every quoted
  // tolerance, and they would only clutter the sparsity pattern)
  const int m_all = sp.grid().m;
  std::vector<double> kern(m_all + 1, 0.0);
  double kern_max = 0.0;
  for (int k = 1; k <= m_all; ++k) {
    const double r = sp.grid().node(k);
    kern[k] = std::sqrt(4.0 * kPi) * r * phi(r);
    if (!std::isfinite(kern[k]))
      throw ConfigError("assemble_smeared: profile not finite on the grid");
    kern_max = std::max(kern_max, std::abs(kern[k]));
  }
  for (int k = 1; k <= m_all; ++k)
    if (std::abs(kern[k]) < 1e-16 * kern_max) kern[k] = 0.0;

  for (int n = 0; n < sp.n_max(); ++n) {
    const SectorBasis& bn = sp.basis(n);
    const SectorBasis& bup = sp.basis(n + 1);
    const int m_up = bup.m_nodes();
    const double hn = std::pow(h, n);
    const double gs = model.g * std::sqrt(n + 1.0);
    const std::int64_t off_n = sp.sector_offset(n);
    for (std::int64_t i = 0; i < bn.size(); ++i) {
      const auto e = bn.entry(i);
      if (n > 0 && e[n - 1] > m_up) continue;
      const double wrow = hn * multiplicity(e);
      for (int k = 1; k <= m_up; ++k) {
        const double s = wrow * gs * h * kern[k];
        if (s == 0.0) continue;
        acc.form(off_n + i,
                 sp.sector_offset(n + 1) + bup.rank_with_inserted(bn, i, k),
                 s);
      }
    }
  }
  return SparseHermitian(space, std::move(acc.out));
}

SparseHermitian assemble_smeared(const ModelParams& model,
                                 const CutoffSpec& cutoff,
                                 const FockSpacePtr& space) {
  if (cutoff.kind != CutoffSpec::Kind::Smeared)
    throw ConfigError("assemble_smeared: cutoff kind mismatch");
  return assemble_smeared(model, gaussian_profile(cutoff.sigma), space);
}

}  // namespace ibclab
