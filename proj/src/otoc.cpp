#include "qps/otoc.hpp"

#include <cmath>

namespace qps {

namespace {

std::string cell_label(const PlanckBasis& basis, int cell) {
  auto [iq, ip] = basis.grid.cell_split(cell);
  return "cell:" + std::to_string(iq) + "," + std::to_string(ip);
}

void require_cell(const PlanckBasis& basis, int cell, const std::string& what) {
  if (cell < 0 || cell >= basis.dim())
    throw std::invalid_argument(what + ": cell index " + std::to_string(cell) +
                                " out of range [0, " + std::to_string(basis.dim()) + ")");
}

// |i[A, B] e_x|^2 = <x|(i[A, B])^2|x> for hermitian A, B
double otoc_value(const CMatrix& a, const CMatrix& b, int cell) {
  const CVector w = a * b.col(cell) - b * (a.col(cell));
  return w.squaredNorm();
}

}  // namespace

CMatrix to_cell_frame(const CMatrix& a, const PlanckBasis& basis) {
  require_same_dim(a, basis.frame, "to_cell_frame");
  return basis.frame.adjoint() * a * basis.frame;
}

HeisenbergTrack heisenberg_track(const CMatrix& u_step, const CMatrix& a, int n_steps,
                                 int stride, double dt, const std::string& label) {
  require_same_dim(u_step, a, "heisenberg_track");
  if (n_steps < 0 || stride < 1)
    throw std::invalid_argument("heisenberg_track: need n_steps >= 0, stride >= 1");

  HeisenbergTrack track;
  track.label = label;
  track.dt = dt;
  track.steps.push_back(0);
  track.times.push_back(0.0);
  track.a_t.push_back(a);  // A(0) = A exactly

  CMatrix current = a;
  for (int k = 1; k <= n_steps; ++k) {
    current = (u_step.adjoint() * current * u_step).eval();
    track.max_drift = std::max(track.max_drift, hermiticity_error(current));
    current = 0.5 * (current + current.adjoint().eval());
    if (k % stride == 0 || k == n_steps) {
      track.steps.push_back(k);
      track.times.push_back(k * dt);
      track.a_t.push_back(current);
    }
  }
  return track;
}

OtocRecord cell_otoc(const HeisenbergTrack& track, const CMatrix& b, const PlanckBasis& basis,
                     int cell) {
  require_cell(basis, cell, "cell_otoc");
  OtocRecord rec;
  rec.cell_label = cell_label(basis, cell);
  rec.pair = "(" + track.label + ",B)";
  rec.times = track.times;
  rec.values.resize(track.samples());
  for (int i = 0; i < track.samples(); ++i) rec.values(i) = otoc_value(track.a_t[i], b, cell);
  return rec;
}

ThermalWeight ThermalWeight::gibbs(CMatrix density) {
  ThermalWeight w;
  w.infinite_temperature = false;
  const double trace_err = std::abs(density.trace() - Complex(1.0, 0.0));
  if (trace_err > 1e-8)
    throw std::invalid_argument("ThermalWeight::gibbs: density matrix trace differs from 1 by " +
                                std::to_string(trace_err));
  require_hermitian(density, 1e-8, "gibbs density matrix");
  w.rho = std::move(density);
  return w;
}

OtocRecord thermal_otoc(const HeisenbergTrack& track, const CMatrix& b,
                        const ThermalWeight& weight) {
  if (!weight.infinite_temperature)
    require_same_dim(weight.rho, b, "thermal_otoc");
  OtocRecord rec;
  rec.cell_label = weight.infinite_temperature ? "thermal:inf" : "thermal:gibbs";
  rec.pair = "(" + track.label + ",B)";
  rec.times = track.times;
  rec.values.resize(track.samples());
  const double dim = static_cast<double>(b.rows());
  for (int i = 0; i < track.samples(); ++i) {
    const CMatrix c = commutator_i(track.a_t[i], b);
    if (weight.infinite_temperature) {
      rec.values(i) = c.squaredNorm() / dim;  // Tr(C^2)/D for hermitian C
    } else {
      rec.values(i) = (weight.rho * (c * c)).trace().real();
    }
  }
  return rec;
}

CMatrix spreading_function(const CMatrix& u_cell, const CoarseMap& gmap) {
  const int d = static_cast<int>(u_cell.rows());
  if (static_cast<int>(gmap.target.size()) != d)
    throw std::invalid_argument("spreading_function: coarse map dimension mismatch");
  CMatrix f = u_cell;
  for (int x = 0; x < d; ++x) f(gmap.target[x], x) -= gmap.phase(x);
  return f;
}

UnitarityDefect unitarity_defect(const CMatrix& f, const CoarseMap& gmap) {
  const int d = static_cast<int>(f.rows());
  UnitarityDefect defect;
  double sum = 0.0;
  for (int x = 0; x < d; ++x) {
    for (int xp = 0; xp < d; ++xp) {
      const Complex r = gmap.phase(xp) * std::conj(f(gmap.target[x], xp)) +
                        std::conj(gmap.phase(x)) * f(gmap.target[xp], x);
      const double mag = std::abs(r);
      defect.max = std::max(defect.max, mag);
      sum += mag;
    }
  }
  defect.mean = sum / (static_cast<double>(d) * d);
  return defect;
}

double second_order_otoc(const CMatrix& f, const CoarseMap& gmap, const PlanckBasis& basis,
                         int cell) {
  require_cell(basis, cell, "second_order_otoc");
  const PhaseSpaceGrid& grid = basis.grid;
  const int d = basis.dim();
  const int gx = gmap.target[cell];
  const double px = basis.cell_coords[cell].p;
  const double qgx = basis.cell_coords[gx].q;
  double sum = 0.0;
  for (int z = 0; z < d; ++z) {
    const int gz = gmap.target[z];
    const double dp = grid.diff_p(basis.cell_coords[z].p, px);
    const double dq = grid.diff_q(basis.cell_coords[gz].q, qgx);
    sum += dp * dp * dq * dq * std::norm(f(gz, cell));
  }
  return sum;
}

double early_time_approx(const CoarseMap& gmap, const PhaseSpaceGrid& grid, int cell,
                         int neighborhood_radius, char axis) {
  if (neighborhood_radius < 1)
    throw std::invalid_argument("early_time_approx: radius must be >= 1 cell");
  const auto [iq0, ip0] = grid.cell_split(cell);
  const PhasePoint gx = grid.cell_center(gmap.target[cell]);
  double sum = 0.0;
  for (int diq = -neighborhood_radius; diq <= neighborhood_radius; ++diq) {
    for (int dip = -neighborhood_radius; dip <= neighborhood_radius; ++dip) {
      int iq = iq0 + diq, ip = ip0 + dip;
      if (grid.q_periodic)
        iq = (iq % grid.l_q + grid.l_q) % grid.l_q;
      else if (iq < 0 || iq >= grid.l_q)
        continue;
      if (grid.p_periodic)
        ip = (ip % grid.l_p + grid.l_p) % grid.l_p;
      else if (ip < 0 || ip >= grid.l_p)
        continue;
      const PhasePoint gz = grid.cell_center(gmap.target[grid.cell_index(iq, ip)]);
      const double diff =
          axis == 'p' ? grid.diff_p(gz.p, gx.p) : grid.diff_q(gz.q, gx.q);
      sum += diff * diff;
    }
  }
  return sum;
}

SectionImage quantum_section(const CMatrix& u_cell_step, const PlanckBasis& basis,
                             const CMatrix& a, const CMatrix& b, int n_steps, double dt,
                             const std::string& pair) {
  require_same_dim(u_cell_step, a, "quantum_section");
  require_same_dim(a, b, "quantum_section");
  const int d = basis.dim();
  SectionImage image;
  image.grid = basis.grid;
  image.t_final = n_steps * dt;
  image.pair = pair;
  image.values = RVector::Zero(d);

  CMatrix a_t = a;
  for (int k = 0; k < n_steps; ++k) {
    a_t = (u_cell_step.adjoint() * a_t * u_cell_step).eval();
    a_t = 0.5 * (a_t + a_t.adjoint().eval());
  }
  const CMatrix c = commutator_i(a_t, b);
  for (int x = 0; x < d; ++x) image.values(x) = c.col(x).squaredNorm();
  return image;
}

std::vector<double> width_track(const CMatrix& u_cell_step, const PlanckBasis& basis, int cell,
                                int n_steps) {
  require_cell(basis, cell, "width_track");
  const RVector p = basis.p_values();
  const double p0 = p(cell);
  CVector psi = CVector::Unit(basis.dim(), cell);
  std::vector<double> w2;
  w2.reserve(n_steps + 1);
  for (int k = 0;; ++k) {
    double val = 0.0;
    for (int j = 0; j < basis.dim(); ++j) {
      const double dp = p(j) - p0;
      val += dp * dp * std::norm(psi(j));
    }
    w2.push_back(val);
    if (k == n_steps) break;
    psi = u_cell_step * psi;
  }
  return w2;
}

// ---------------------------------------------------------- continuous time

SpectralEvolver::SpectralEvolver(const CMatrix& h_cell, double hbar)
    : decomp_(eig_hermitian(h_cell)), hbar_(hbar) {
  if (hbar <= 0.0) throw std::invalid_argument("SpectralEvolver: hbar must be > 0");
}

CVector SpectralEvolver::evolve(const CVector& v, double t) const {
  return decomp_.unitary_exp_apply(-t / hbar_, v);
}

CMatrix SpectralEvolver::propagator(double t) const { return decomp_.unitary_exp(-t / hbar_); }

CVector SpectralEvolver::heisenberg_apply(const CMatrix& a, double t, const CVector& v) const {
  return evolve(a * evolve(v, t), -t);
}

OtocRecord cell_otoc_spectral(const SpectralEvolver& evolver, const CMatrix& a, const CMatrix& b,
                              const PlanckBasis& basis, int cell,
                              const std::vector<double>& times) {
  require_cell(basis, cell, "cell_otoc_spectral");
  OtocRecord rec;
  rec.cell_label = cell_label(basis, cell);
  rec.pair = "(A,B)";
  rec.times = times;
  rec.values.resize(static_cast<int>(times.size()));
  const CVector ex = CVector::Unit(basis.dim(), cell);
  const CVector bx = b.col(cell);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const CVector w = evolver.heisenberg_apply(a, t, bx) - b * evolver.heisenberg_apply(a, t, ex);
    rec.values(static_cast<int>(i)) = w.squaredNorm();
  }
  return rec;
}

OtocRecord thermal_otoc_spectral(const SpectralEvolver& evolver, const CMatrix& a,
                                 const CMatrix& b, const ThermalWeight& weight,
                                 const std::vector<double>& times) {
  OtocRecord rec;
  rec.cell_label = weight.infinite_temperature ? "thermal:inf" : "thermal:gibbs";
  rec.pair = "(A,B)";
  rec.times = times;
  rec.values.resize(static_cast<int>(times.size()));
  const double dim = static_cast<double>(a.rows());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CMatrix u = evolver.propagator(times[i]);
    const CMatrix a_t = u.adjoint() * a * u;
    const CMatrix c = commutator_i(a_t, b);
    rec.values(static_cast<int>(i)) = weight.infinite_temperature
                                          ? c.squaredNorm() / dim
                                          : (weight.rho * (c * c)).trace().real();
  }
  return rec;
}

std::vector<double> width_track_spectral(const SpectralEvolver& evolver,
                                         const PlanckBasis& basis, int cell,
                                         const std::vector<double>& times) {
  require_cell(basis, cell, "width_track_spectral");
  const RVector p = basis.p_values();
  const double p0 = p(cell);
  const CVector ex = CVector::Unit(basis.dim(), cell);
  std::vector<double> w2;
  w2.reserve(times.size());
  for (double t : times) {
    const CVector psi = t == 0.0 ? ex : CVector(evolver.evolve(ex, t));
    double val = 0.0;
    for (int j = 0; j < basis.dim(); ++j) {
      const double dp = p(j) - p0;
      val += dp * dp * std::norm(psi(j));
    }
    w2.push_back(val);
  }
  return w2;
}

}  // namespace qps
