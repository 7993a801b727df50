#pragma once

// The three quantum systems: kicked rotor on the torus (one-kick Floquet
// operator), the two-mode LMG boson model in Fock space, and the inverted
// harmonic oscillator on a hard-walled grid, plus Gibbs states.

#include "qps/planck.hpp"

namespace qps {

// ---------------------------------------------------------------- kicked rotor

struct KickedRotorSpec {
  double kick_strength = 4.7;
  int cells_per_axis = 30;  // L; D = L^2, hbar = 2*pi/L^2

  int dim() const { return cells_per_axis * cells_per_axis; }
  double hbar() const;
  void validate() const;
};

// Torus [0, 2*pi) x [0, 2*pi) split into L x L cells.
PhaseSpaceGrid kicked_rotor_grid(int cells_per_axis);

// U = exp(-i p^2 / (2 hbar)) exp(-i K cos(q) / hbar) in the position basis
// q_j = 2*pi*j/D, assembled from its exact diagonal factors joined by the
// discrete Fourier transform.
CMatrix kicked_rotor_floquet(const KickedRotorSpec& spec);

// Position-slice cell basis on the rotor grid (samples at the model's
// left-edge grid points).
PlanckBasis kicked_rotor_cell_basis(const KickedRotorSpec& spec);

// ------------------------------------------------------------------------ LMG

struct LmgSpec {
  int bosons = 1680;  // N; requires N + 1 = L^2 with L odd
  double xi = -2.0;

  int dim() const { return bosons + 1; }
  double hbar() const { return 1.0 / bosons; }
  void validate() const;
};

// H = (a1+ a0 + a0+ a1)/2 + (xi / 2N) (n1 - n0)^2 in the Fock basis
// |s, N-s>, s = 0..N.
CMatrix lmg_hamiltonian(const LmgSpec& spec);

// p |s, N-s> = ((N - 2s) / 2N) |s, N-s>, s ascending.
CMatrix lmg_momentum_operator(int bosons);

// Discrete Planck-cell basis for the LMG Fock space; q_offset shifts the Q
// lattice (pi / L centers a cell exactly on the saddle at (pi, 0)).
PlanckBasis lmg_cell_basis(const LmgSpec& spec, double q_offset);

// q_offset placing a cell center exactly at q = pi.
double lmg_saddle_q_offset(int cells_per_axis);

// ------------------------------------------------------------------------ IHO

enum class KineticKind { spectral, central_diff };

struct IhoSpec {
  double hbar = 0.002;
  int l_q = 9;   // cells along q in [-1/2, 1/2]
  int l_p = 17;  // cells along p; p_extent = 2*pi*hbar*l_q*l_p
  KineticKind kinetic = KineticKind::spectral;
  double p_cutoff = 0.0;  // 0 = derive p_extent/2 from the grid

  int dim() const { return l_q * l_p; }
  double dx() const { return 1.0 / dim(); }
  void validate() const;
};

// Desk-scale cell counts for a given hbar: l_q ~ 1/sqrt(2*pi*hbar) (nearest
// odd) and l_p odd covering |p| <= cutoff.
IhoSpec iho_default_spec(double hbar, double p_cutoff = 1.0);

// Box [-1/2, 1/2] x [-p_ext/2, p_ext/2]; position samples at midpoints.
PhaseSpaceGrid iho_grid(const IhoSpec& spec);

// H = p^2/2 - q^2/2 with Dirichlet hard walls at q = +-1/2. The kinetic term
// is either the sine-spectral realization (exact continuum dispersion on the
// Dirichlet-symmetric modes) or the central-difference stencil.
// potential_sign = -1 is the inverted oscillator, +1 the ordinary one.
CMatrix iho_hamiltonian(const IhoSpec& spec, double potential_sign = -1.0);

RVector iho_position_grid(const IhoSpec& spec);
CMatrix iho_position_operator(const IhoSpec& spec);  // diag(q_j)
// Central-difference p = -i hbar d/dq with Dirichlet ghosts; hermitian.
CMatrix iho_momentum_operator(const IhoSpec& spec);

PlanckBasis iho_cell_basis(const IhoSpec& spec);

// ------------------------------------------------------------------ Gibbs state

// rho = exp(-H/T) / Tr exp(-H/T), computed through eig_hermitian with a
// max-eigenvalue shift for overflow safety.
CMatrix gibbs_state(const CMatrix& h, double temperature);

}  // namespace qps
