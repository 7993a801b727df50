#include "qps/observables.hpp"

#include <cmath>
#include <numbers>

namespace qps {

double gwvn_entropy_from_populations(const RVector& populations) {
  const int d = static_cast<int>(populations.size());
  if (d < 2) return 0.0;
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    const double rho = populations(j);
    if (rho > 0.0) s -= rho * std::log(rho);
  }
  return s / std::log(static_cast<double>(d));
}

double gwvn_entropy(const CVector& state, const PlanckBasis& basis) {
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-8)
    throw std::invalid_argument("gwvn_entropy: state norm differs from 1 by " +
                                std::to_string(std::abs(norm - 1.0)));
  return gwvn_entropy_from_populations(cell_amplitudes(state, basis).cwiseAbs2());
}

EhrenfestTrack ehrenfest_delta(const CMatrix& u_cell_step, const PlanckBasis& basis, int cell,
                               const ClassicalSystem& system, PhasePoint classical_start,
                               int n_steps, double dt, double threshold) {
  if (cell < 0 || cell >= basis.dim())
    throw std::invalid_argument("ehrenfest_delta: cell out of range");
  const PhaseSpaceGrid& grid = basis.grid;
  const RVector q = basis.q_values();
  const RVector p = basis.p_values();

  EhrenfestTrack track;
  track.threshold = threshold;
  CVector psi = CVector::Unit(basis.dim(), cell);
  PhasePoint cls = grid.wrap(classical_start);

  for (int k = 0; k <= n_steps; ++k) {
    if (k > 0) {
      psi = u_cell_step * psi;
      cls = grid.wrap(flow(system, cls, system.is_map() ? 1.0 : dt));
    }
    // plain expectations of the macroscopic operators (diagonal in the cell
    // frame)
    double eq = 0.0, ep = 0.0;
    for (int j = 0; j < basis.dim(); ++j) {
      const double w = std::norm(psi(j));
      eq += w * q(j);
      ep += w * p(j);
    }
    const double delta = std::hypot(grid.diff_q(cls.q, eq), grid.diff_p(cls.p, ep));
    track.times.push_back(k * dt);
    track.delta.push_back(delta);
  }

  // reference level: the largest deviation over the early part of the track
  // (first fifth, excluding the exact-zero t = 0 sample when the classical
  // start coincides with the cell center)
  track.plateau = track.delta.front();
  const double early = 0.2 * track.times.back();
  for (std::size_t i = 1; i < track.delta.size(); ++i)
    if (track.times[i] <= early) track.plateau = std::max(track.plateau, track.delta[i]);
  if (track.plateau > 0.0) {
    for (std::size_t i = 0; i < track.delta.size(); ++i) {
      if (track.delta[i] > threshold * track.plateau) {
        track.t_e = track.times[i];
        break;
      }
    }
  }
  return track;
}

}  // namespace qps
