#pragma once

// Scalar diagnostics of wave-packet spreading: normalized GWvN entropy of
// the Planck-cell populations and the Ehrenfest-time deviation Delta(t).

#include "qps/classical.hpp"
#include "qps/otoc.hpp"

namespace qps {

// Shannon entropy of the populations, normalized by ln(D); 0 for a single
// occupied cell, 1 for the uniform spread, with 0 ln 0 = 0.
double gwvn_entropy_from_populations(const RVector& populations);

// Entropy of |<x|psi>|^2 for a normalized model-frame state.
double gwvn_entropy(const CVector& state, const PlanckBasis& basis);

struct EhrenfestTrack {
  std::vector<double> times;
  std::vector<double> delta;
  double plateau = 0.0;     // reference level: largest Delta over the early fifth of the track
  double t_e = -1.0;        // first time delta exceeds threshold * plateau, -1 if never
  double threshold = 5.0;
};

// Delta(t) = sqrt((q(t) - <Q(t)>)^2 + (p(t) - <P(t)>)^2) between the
// classical trajectory from classical_start and the quantum expectations in
// the cell state; distances use the minimal image on periodic axes. The
// quantum side evolves with the cell-frame step operator.
EhrenfestTrack ehrenfest_delta(const CMatrix& u_cell_step, const PlanckBasis& basis, int cell,
                               const ClassicalSystem& system, PhasePoint classical_start,
                               int n_steps, double dt, double threshold = 5.0);

}  // namespace qps
