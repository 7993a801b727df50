#pragma once

// Classical counterparts of the quantum models: the standard map, the LMG
// mean-field flow, the inverted-oscillator flow, Poincare-section sampling,
// the coarse-grained cell map g_c, and saddle-point Lyapunov exponents.

#include "qps/planck.hpp"

#include <cstdint>
#include <vector>

namespace qps {

enum class SystemKind { standard_map, lmg_mean_field, inverted_oscillator };

struct ClassicalSystem {
  SystemKind kind = SystemKind::standard_map;
  double kick_strength = 0.0;  // standard map
  double xi = -2.0;            // LMG mean field
  double flow_dt = 1e-3;       // fixed RK4 step for continuous flows

  static ClassicalSystem standard_map(double kick_strength);
  static ClassicalSystem lmg_mean_field(double xi = -2.0);
  static ClassicalSystem inverted_oscillator();

  bool is_map() const { return kind == SystemKind::standard_map; }

  // H(q, p) for the continuous flows (throws for the standard map).
  double hamiltonian(double q, double p) const;
};

// One kick: p' = (p + K sin q) mod 2*pi, q' = (q + p') mod 2*pi.
PhasePoint standard_map_step(PhasePoint x, double kick_strength);

// Fixed-step fourth-order integration of Hamilton's equations for time t
// (t < 0 integrates backwards). For the standard map, t must be a whole
// number of kicks. Throws when an LMG trajectory reaches the |p| = 1/2
// coordinate singularity.
PhasePoint flow(const ClassicalSystem& system, PhasePoint start, double t);

struct SectionCloud {
  std::vector<PhasePoint> points;
  std::uint64_t seed = 0;
  int n_samples = 0;
  int n_iterations = 0;
};

// Random phase-space samples iterated forward; all intermediate points are
// kept. Deterministic given the seed. Continuous flows are sampled
// stroboscopically with period `period`.
SectionCloud poincare_section(const ClassicalSystem& system, const PhaseSpaceGrid& box,
                              int n_samples, int n_iterations, std::uint64_t seed,
                              double period = 1.0);

// The time-t coarse-grained classical map: target[x] is the cell containing
// the classical image of the center of cell x, phase[x] the unit-modulus
// phase of the cell-frame propagator element <g_c x|U(t)|x>.
struct CoarseMap {
  double t = 0.0;
  std::vector<int> target;
  CVector phase;
  RVector magnitude;             // |<g_c x|U(t)|x>| diagnostic
  std::vector<int> flagged;      // cells with |element| below the phase floor
  std::vector<int> escaped;      // cells whose classical image left an open box
  int collision_count = 0;       // distinct cells sharing a target
};

// u_cell is the time-t propagator already expressed in the cell frame
// (frame^dagger U frame); t = 0 short-circuits to the exact identity map.
CoarseMap coarse_map(const ClassicalSystem& system, const PlanckBasis& basis, double t,
                     const CMatrix& u_cell);

// Largest real part of the eigenvalues of the linearized flow at a
// stationary point, second derivatives by central differences (step 1e-5).
double saddle_lyapunov(const ClassicalSystem& system, PhasePoint point,
                       double stationarity_tol = 1e-8);

}  // namespace qps
