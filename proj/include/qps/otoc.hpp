#pragma once

// The core pipeline: Heisenberg evolution, the Planck-cell OTOC
// C(t, x) = -<x|[A(t), B]^2|x>, thermal OTOCs, the quantum spreading
// function f, the second-order formula, the early-time approximation, and
// full quantum Poincare sections.
//
// Convention: every operator and propagator handed to this module lives in
// the cell frame (conjugated with the Planck-basis frame), so the cell state
// |x> is the unit vector e_x and the macroscopic operators are exact
// diagonals. Callers convert once with to_cell_frame().

#include "qps/classical.hpp"
#include "qps/numerics.hpp"
#include "qps/planck.hpp"

#include <string>
#include <vector>

namespace qps {

// frame^dagger A frame
CMatrix to_cell_frame(const CMatrix& a, const PlanckBasis& basis);

struct HeisenbergTrack {
  std::string label;
  double dt = 1.0;                // time per evolution step
  std::vector<int> steps;         // stored step indices (0, stride, ..., n)
  std::vector<double> times;      // steps * dt
  std::vector<CMatrix> a_t;       // A(k) = U^{-k} A U^k, re-symmetrized
  double max_drift = 0.0;         // largest hermiticity drift seen before re-symmetrizing

  int samples() const { return static_cast<int>(a_t.size()); }
};

// A(k) = U^dagger^k A U^k computed iteratively, storing step 0, every
// stride-th step, and the final step.
HeisenbergTrack heisenberg_track(const CMatrix& u_step, const CMatrix& a, int n_steps,
                                 int stride = 1, double dt = 1.0,
                                 const std::string& label = "A");

struct OtocRecord {
  std::string cell_label;  // "cell:iq,ip" or "thermal:inf" / "thermal:T"
  std::string pair;
  std::vector<double> times;
  RVector values;
};

OtocRecord cell_otoc(const HeisenbergTrack& track, const CMatrix& b, const PlanckBasis& basis,
                     int cell);

struct ThermalWeight {
  bool infinite_temperature = true;
  CMatrix rho;  // cell-frame density matrix when not infinite

  static ThermalWeight infinite() { return {}; }
  static ThermalWeight gibbs(CMatrix density);
};

// -Tr([A(t), B]^2)/D at infinite temperature (equals the uniform cell
// average of C(t, x)), or -Tr(rho [A(t), B]^2) for a Gibbs weight.
OtocRecord thermal_otoc(const HeisenbergTrack& track, const CMatrix& b,
                        const ThermalWeight& weight);

// f(x', x, t) = <x'|U(t)|x> - e^{i phi(x)} delta_{x', g_c x}, as a dense
// cells x cells matrix indexed [x'][x].
CMatrix spreading_function(const CMatrix& u_cell, const CoarseMap& gmap);

struct UnitarityDefect {
  double max = 0.0;
  double mean = 0.0;
};

// Residual of the first-order identity
// e^{i phi(x')} f*(g_c x, x') + e^{-i phi(x)} f(g_c x', x) over all pairs.
UnitarityDefect unitarity_defect(const CMatrix& f, const CoarseMap& gmap);

// C^(2) = sum_z (P_z - P_x)^2 (Q_{g_c z} - Q_{g_c x})^2 |f(g_c z, x)|^2,
// coordinate differences with the minimal-image convention on tori.
double second_order_otoc(const CMatrix& f, const CoarseMap& gmap, const PlanckBasis& basis,
                         int cell);

// sum_z (Q_{g_c z} - Q_{g_c x})^2 over the lattice neighborhood of x
// (Chebyshev radius in cell indices); exponent extraction only, no
// prefactor. axis selects the Q ('q') or P ('p') coordinate.
double early_time_approx(const CoarseMap& gmap, const PhaseSpaceGrid& grid, int cell,
                         int neighborhood_radius, char axis = 'q');

struct SectionImage {
  PhaseSpaceGrid grid;
  RVector values;  // C(t_final, x) per cell
  double t_final = 0.0;
  std::string pair;
};

// C(n_steps * dt, x) for every cell from a single Heisenberg evolution of A.
SectionImage quantum_section(const CMatrix& u_cell_step, const PlanckBasis& basis,
                             const CMatrix& a, const CMatrix& b, int n_steps, double dt = 1.0,
                             const std::string& pair = "(Q,P)");

// W^2(k) = <x|U^-k (P - P_x)^2 U^k|x> along the P axis of the cell lattice.
std::vector<double> width_track(const CMatrix& u_cell_step, const PlanckBasis& basis, int cell,
                                int n_steps);

// ---------------------------------------------------------- continuous time

// Exact-eigendecomposition evolution for continuous-time models; every
// readout is O(D^2) per sample.
class SpectralEvolver {
 public:
  SpectralEvolver(const CMatrix& h_cell, double hbar);

  const SpectralDecomp& decomposition() const { return decomp_; }
  double hbar() const { return hbar_; }

  CVector evolve(const CVector& v, double t) const;  // e^{-iHt/hbar} v
  CMatrix propagator(double t) const;

  // A(t) v = U(t)^dagger A U(t) v
  CVector heisenberg_apply(const CMatrix& a, double t, const CVector& v) const;

 private:
  SpectralDecomp decomp_;
  double hbar_;
};

// C(t, x) = |i[A(t), B] e_x|^2 at the given times.
OtocRecord cell_otoc_spectral(const SpectralEvolver& evolver, const CMatrix& a, const CMatrix& b,
                              const PlanckBasis& basis, int cell,
                              const std::vector<double>& times);

// Thermal OTOC at the given times; O(D^3) per sample.
OtocRecord thermal_otoc_spectral(const SpectralEvolver& evolver, const CMatrix& a,
                                 const CMatrix& b, const ThermalWeight& weight,
                                 const std::vector<double>& times);

std::vector<double> width_track_spectral(const SpectralEvolver& evolver,
                                         const PlanckBasis& basis, int cell,
                                         const std::vector<double>& times);

}  // namespace qps
