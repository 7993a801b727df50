#pragma once

// Planck-cell (von Neumann lattice) bases and the macroscopic operators
// diagonal in them. A basis is a unitary change of frame between the model's
// computational basis and cell labels; bases are immutable after
// construction and shared read-only across per-cell sweeps.

#include "qps/numerics.hpp"

#include <utility>
#include <vector>

namespace qps {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

// Rectangular partition of a phase-space box into l_q x l_p cells of area
// 2*pi*hbar each. The origin is the lower-left corner of the box; cell
// centers sit at origin + ((i + 1/2) dq, (j + 1/2) dp).
struct PhaseSpaceGrid {
  double q_origin = 0.0;
  double p_origin = 0.0;
  double q_extent = 0.0;
  double p_extent = 0.0;
  int l_q = 0;
  int l_p = 0;
  double hbar = 0.0;
  bool q_periodic = false;
  bool p_periodic = false;

  PhaseSpaceGrid() = default;
  PhaseSpaceGrid(double q0, double p0, double qext, double pext, int lq, int lp, double hb,
                 bool q_per = false, bool p_per = false);

  double dq() const { return q_extent / l_q; }
  double dp() const { return p_extent / l_p; }
  int cell_count() const { return l_q * l_p; }

  int cell_index(int iq, int ip) const { return iq * l_p + ip; }
  std::pair<int, int> cell_split(int cell) const { return {cell / l_p, cell % l_p}; }

  PhasePoint cell_center(int cell) const;

  // Cell containing the given phase-space point; periodic axes wrap, open
  // axes must stay inside the box.
  int locate(double q, double p) const;

  // Minimal-image coordinate differences (plain differences on open axes).
  double diff_q(double a, double b) const;
  double diff_p(double a, double b) const;

  // Wrap a point into the box along periodic axes.
  PhasePoint wrap(PhasePoint x) const;
};

enum class BasisKind { position_slice, momentum_slice, discrete_fock };

const char* to_string(BasisKind kind);

struct PlanckBasis {
  PhaseSpaceGrid grid;
  BasisKind kind = BasisKind::position_slice;
  CMatrix frame;                        // column j = state of cell j in the model frame
  std::vector<PhasePoint> cell_coords;  // lattice label (Q_x, P_x) per column

  int dim() const { return static_cast<int>(frame.cols()); }

  // Label coordinates as dense vectors, indexed like the columns.
  RVector q_values() const;
  RVector p_values() const;
};

// Basis of position-slice cell states: the column for cell (Q, P) is
// supported on the q samples inside [Q, Q + dq) and carries the phase
// e^{i P q / hbar}. q_grid_points must equal l_q * l_p so the basis is
// complete; sample_offset places the samples at q_origin + (j + offset) dx
// (0.5 = midpoint rule, 0 = left edge, matching the model's grid).
PlanckBasis build_position_slice_basis(const PhaseSpaceGrid& grid, int q_grid_points,
                                       double sample_offset = 0.5);

// Momentum-space twin, built in the momentum computational basis with phase
// e^{-i Q p / hbar}.
PlanckBasis build_momentum_slice_basis(const PhaseSpaceGrid& grid, int p_grid_points,
                                       double sample_offset = 0.5);

// Discrete cell basis for an (N+1)-dimensional two-mode boson system with
// N + 1 = L^2, L odd. The computational basis is the p-eigenbasis ordered by
// s = 0..N (p = (N-2s)/2N descending in s). Cell labels are
// (q_offset + 2 pi n1 / L, L n2 / N) and label the cell centers.
PlanckBasis build_discrete_fock_basis(int bosons, int cells_per_axis, double q_offset = 0.0);

// Throws unless bosons + 1 is an odd perfect square; returns L.
int discrete_fock_cells_per_axis(int bosons);

// Re-express a basis in another frame: frame -> u * frame.
PlanckBasis transformed(const PlanckBasis& basis, const CMatrix& u);

struct MacroscopicOps {
  CMatrix qhat;
  CMatrix phat;
};

// Q = frame diag(Q_x) frame^dagger and likewise for P, in the model frame.
MacroscopicOps macroscopic_operators(const PlanckBasis& basis);

// frame^dagger * state
CVector cell_amplitudes(const CVector& state, const PlanckBasis& basis);

// D x D unitary mapping momentum-frame amplitudes to position-frame
// amplitudes for a box grid: entries <q_j|p_n> = e^{i p_n q_j / hbar}/sqrt(D)
// with samples q_j = q_origin + (j + q_offset) q_extent/D and
// p_n = p_origin + (n + p_offset) p_extent/D.
CMatrix fourier_frame(const PhaseSpaceGrid& grid, double q_offset = 0.0, double p_offset = 0.0);

}  // namespace qps
