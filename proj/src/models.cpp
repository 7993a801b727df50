#include "qps/models.hpp"

#include <cmath>
#include <numbers>

namespace qps {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double pi = std::numbers::pi;

int nearest_odd(double x) {
  int n = static_cast<int>(std::lround((x - 1.0) / 2.0));
  if (n < 0) n = 0;
  return 2 * n + 1;
}
}  // namespace

// ---------------------------------------------------------------- kicked rotor

double KickedRotorSpec::hbar() const {
  return two_pi / (static_cast<double>(cells_per_axis) * cells_per_axis);
}

void KickedRotorSpec::validate() const {
  if (cells_per_axis < 2) throw std::invalid_argument("KickedRotorSpec: L must be >= 2");
  if (kick_strength < 0.0) throw std::invalid_argument("KickedRotorSpec: K must be >= 0");
}

PhaseSpaceGrid kicked_rotor_grid(int cells_per_axis) {
  const double hbar = two_pi / (static_cast<double>(cells_per_axis) * cells_per_axis);
  return PhaseSpaceGrid(0.0, 0.0, two_pi, two_pi, cells_per_axis, cells_per_axis, hbar,
                        /*q_per=*/true, /*p_per=*/true);
}

CMatrix kicked_rotor_floquet(const KickedRotorSpec& spec) {
  spec.validate();
  const int d = spec.dim();
  const double hbar = spec.hbar();
  const PhaseSpaceGrid grid = kicked_rotor_grid(spec.cells_per_axis);

  CVector kick(d), free(d);
  for (int j = 0; j < d; ++j) {
    const double q = two_pi * j / d;
    kick(j) = std::exp(Complex(0.0, -spec.kick_strength * std::cos(q) / hbar));
  }
  for (int n = 0; n < d; ++n) {
    const double p = hbar * n;
    free(n) = std::exp(Complex(0.0, -p * p / (2.0 * hbar)));
  }
  const CMatrix f = fourier_frame(grid);  // momentum -> position amplitudes
  CMatrix u = f * free.asDiagonal() * f.adjoint();
  u = u * kick.asDiagonal();
  return u;
}

PlanckBasis kicked_rotor_cell_basis(const KickedRotorSpec& spec) {
  spec.validate();
  return build_position_slice_basis(kicked_rotor_grid(spec.cells_per_axis), spec.dim(),
                                    /*sample_offset=*/0.0);
}

// ------------------------------------------------------------------------ LMG

void LmgSpec::validate() const {
  if (bosons < 1) throw std::invalid_argument("LmgSpec: N must be >= 1");
}

CMatrix lmg_hamiltonian(const LmgSpec& spec) {
  spec.validate();
  const int n = spec.bosons;
  CMatrix h = CMatrix::Zero(n + 1, n + 1);
  for (int s = 0; s <= n; ++s) {
    const double imbalance = static_cast<double>(n - 2 * s);  // n1 - n0 for |s, N-s>
    h(s, s) = spec.xi / (2.0 * n) * imbalance * imbalance;
    if (s < n) {
      const double hop = 0.5 * std::sqrt(static_cast<double>(s + 1) * (n - s));
      h(s + 1, s) = hop;
      h(s, s + 1) = hop;
    }
  }
  return h;
}

CMatrix lmg_momentum_operator(int bosons) {
  if (bosons < 1) throw std::invalid_argument("lmg_momentum_operator: N must be >= 1");
  CMatrix p = CMatrix::Zero(bosons + 1, bosons + 1);
  for (int s = 0; s <= bosons; ++s)
    p(s, s) = static_cast<double>(bosons - 2 * s) / (2.0 * bosons);
  return p;
}

PlanckBasis lmg_cell_basis(const LmgSpec& spec, double q_offset) {
  spec.validate();
  return build_discrete_fock_basis(spec.bosons, discrete_fock_cells_per_axis(spec.bosons),
                                   q_offset);
}

double lmg_saddle_q_offset(int cells_per_axis) { return pi / cells_per_axis; }

// ------------------------------------------------------------------------ IHO

void IhoSpec::validate() const {
  if (hbar <= 0.0) throw std::invalid_argument("IhoSpec: hbar must be > 0");
  if (l_q < 1 || l_p < 1) throw std::invalid_argument("IhoSpec: cell counts must be >= 1");
  if (p_cutoff > 0.0) {
    // largest sine-mode momentum the grid resolves is hbar*pi*D = p_extent/2
    const double p_max = hbar * pi * dim();
    if (p_max < p_cutoff * (1.0 - 1e-9))
      throw std::invalid_argument("IhoSpec: dx too coarse for p_cutoff (Nyquist violation), "
                                  "max resolvable |p| = " + std::to_string(p_max));
  }
}

IhoSpec iho_default_spec(double hbar, double p_cutoff) {
  IhoSpec spec;
  spec.hbar = hbar;
  spec.l_q = nearest_odd(1.0 / std::sqrt(two_pi * hbar));
  const double dp = two_pi * hbar * spec.l_q;
  spec.l_p = nearest_odd(2.0 * p_cutoff / dp);
  spec.p_cutoff = 0.5 * spec.l_p * dp;
  return spec;
}

PhaseSpaceGrid iho_grid(const IhoSpec& spec) {
  spec.validate();
  const double p_extent = two_pi * spec.hbar * spec.dim();
  return PhaseSpaceGrid(-0.5, -0.5 * p_extent, 1.0, p_extent, spec.l_q, spec.l_p, spec.hbar);
}

RVector iho_position_grid(const IhoSpec& spec) {
  const int d = spec.dim();
  RVector q(d);
  for (int j = 0; j < d; ++j) q(j) = -0.5 + (j + 0.5) * spec.dx();
  return q;
}

CMatrix iho_hamiltonian(const IhoSpec& spec, double potential_sign) {
  spec.validate();
  const int d = spec.dim();
  const RVector q = iho_position_grid(spec);
  CMatrix h;
  if (spec.kinetic == KineticKind::spectral) {
    // Dirichlet sine modes on the midpoint grid (DST-II family) with the
    // continuum dispersion (hbar*pi*k)^2 / 2.
    Eigen::MatrixXd s(d, d);
    for (int k = 1; k <= d; ++k) {
      const double norm = (k == d) ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
      for (int j = 0; j < d; ++j) s(j, k - 1) = norm * std::sin(pi * k * (j + 0.5) / d);
    }
    RVector kin(d);
    for (int k = 1; k <= d; ++k) {
      const double p = spec.hbar * pi * k;
      kin(k - 1) = 0.5 * p * p;
    }
    h = (s * kin.asDiagonal() * s.transpose()).cast<Complex>();
  } else {
    const double c = spec.hbar * spec.hbar / (2.0 * spec.dx() * spec.dx());
    h = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      // antisymmetric ghost reflection across the wall half a step outside
      h(j, j) = (j == 0 || j == d - 1) ? 3.0 * c : 2.0 * c;
      if (j + 1 < d) {
        h(j, j + 1) = -c;
        h(j + 1, j) = -c;
      }
    }
  }
  for (int j = 0; j < d; ++j) h(j, j) += potential_sign * 0.5 * q(j) * q(j);
  return h;
}

CMatrix iho_position_operator(const IhoSpec& spec) {
  return CMatrix(iho_position_grid(spec).cast<Complex>().asDiagonal());
}

CMatrix iho_momentum_operator(const IhoSpec& spec) {
  spec.validate();
  const int d = spec.dim();
  const Complex c(0.0, -spec.hbar / (2.0 * spec.dx()));
  CMatrix p = CMatrix::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) {
    p(j, j + 1) = c;
    p(j + 1, j) = -c;
  }
  return p;
}

PlanckBasis iho_cell_basis(const IhoSpec& spec) {
  return build_position_slice_basis(iho_grid(spec), spec.dim(), /*sample_offset=*/0.5);
}

// ------------------------------------------------------------------ Gibbs state

CMatrix gibbs_state(const CMatrix& h, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("gibbs_state: T must be > 0");
  const SpectralDecomp decomp = eig_hermitian(h);
  const double e_min = decomp.eigenvalues.minCoeff();
  RVector w = ((e_min - decomp.eigenvalues.array()) / temperature).exp();
  w /= w.sum();
  CMatrix rho = decomp.eigenvectors * w.asDiagonal() * decomp.eigenvectors.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace qps
