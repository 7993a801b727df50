#include "qps/planck.hpp"

#include <cmath>
#include <numbers>

namespace qps {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_into(double x, double origin, double extent) {
  double y = std::fmod(x - origin, extent);
  if (y < 0.0) y += extent;
  return origin + y;
}
}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(double q0, double p0, double qext, double pext, int lq, int lp,
                               double hb, bool q_per, bool p_per)
    : q_origin(q0),
      p_origin(p0),
      q_extent(qext),
      p_extent(pext),
      l_q(lq),
      l_p(lp),
      hbar(hb),
      q_periodic(q_per),
      p_periodic(p_per) {
  if (l_q < 1 || l_p < 1) throw std::invalid_argument("PhaseSpaceGrid: cell counts must be >= 1");
  if (q_extent <= 0.0 || p_extent <= 0.0)
    throw std::invalid_argument("PhaseSpaceGrid: extents must be > 0");
  if (hbar <= 0.0) throw std::invalid_argument("PhaseSpaceGrid: hbar must be > 0");
  const double cell_area = dq() * dp();
  const double planck_area = two_pi * hbar;
  if (std::abs(cell_area - planck_area) > 1e-12 * planck_area)
    throw std::invalid_argument("PhaseSpaceGrid: dq*dp = " + std::to_string(cell_area) +
                                " differs from 2*pi*hbar = " + std::to_string(planck_area));
}

PhasePoint PhaseSpaceGrid::cell_center(int cell) const {
  auto [iq, ip] = cell_split(cell);
  return {q_origin + (iq + 0.5) * dq(), p_origin + (ip + 0.5) * dp()};
}

int PhaseSpaceGrid::locate(double q, double p) const {
  double qq = q, pp = p;
  if (q_periodic) qq = wrap_into(qq, q_origin, q_extent);
  if (p_periodic) pp = wrap_into(pp, p_origin, p_extent);
  const double uq = (qq - q_origin) / dq();
  const double up = (pp - p_origin) / dp();
  int iq = static_cast<int>(std::floor(uq));
  int ip = static_cast<int>(std::floor(up));
  // points landing exactly on the outer edge belong to the last cell
  if (iq == l_q && uq - l_q < 1e-9) iq = l_q - 1;
  if (ip == l_p && up - l_p < 1e-9) ip = l_p - 1;
  if (iq < 0 || iq >= l_q || ip < 0 || ip >= l_p)
    throw std::domain_error("PhaseSpaceGrid::locate: point (" + std::to_string(q) + ", " +
                            std::to_string(p) + ") outside the phase-space box");
  return cell_index(iq, ip);
}

double PhaseSpaceGrid::diff_q(double a, double b) const {
  double d = a - b;
  if (q_periodic) d -= q_extent * std::round(d / q_extent);
  return d;
}

double PhaseSpaceGrid::diff_p(double a, double b) const {
  double d = a - b;
  if (p_periodic) d -= p_extent * std::round(d / p_extent);
  return d;
}

PhasePoint PhaseSpaceGrid::wrap(PhasePoint x) const {
  if (q_periodic) x.q = wrap_into(x.q, q_origin, q_extent);
  if (p_periodic) x.p = wrap_into(x.p, p_origin, p_extent);
  return x;
}

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::position_slice: return "position_slice";
    case BasisKind::momentum_slice: return "momentum_slice";
    case BasisKind::discrete_fock: return "discrete_fock";
  }
  return "unknown";
}

RVector PlanckBasis::q_values() const {
  RVector v(dim());
  for (int j = 0; j < dim(); ++j) v(j) = cell_coords[j].q;
  return v;
}

RVector PlanckBasis::p_values() const {
  RVector v(dim());
  for (int j = 0; j < dim(); ++j) v(j) = cell_coords[j].p;
  return v;
}

PlanckBasis build_position_slice_basis(const PhaseSpaceGrid& grid, int q_grid_points,
                                       double sample_offset) {
  const int d = grid.cell_count();
  if (q_grid_points % grid.l_q != 0)
    throw std::invalid_argument(
        "build_position_slice_basis: q_grid_points not divisible by l_q");
  if (q_grid_points != d)
    throw std::invalid_argument(
        "build_position_slice_basis: q_grid_points must equal l_q*l_p for a complete basis");

  const double dx = grid.q_extent / d;
  const int per_cell = grid.l_p;  // d / l_q
  const double norm = 1.0 / std::sqrt(static_cast<double>(per_cell));

  PlanckBasis basis;
  basis.grid = grid;
  basis.kind = BasisKind::position_slice;
  basis.frame = CMatrix::Zero(d, d);
  basis.cell_coords.resize(d);
  for (int iq = 0; iq < grid.l_q; ++iq) {
    for (int ip = 0; ip < grid.l_p; ++ip) {
      const int col = grid.cell_index(iq, ip);
      const double bq = grid.q_origin + iq * grid.dq();
      const double bp = grid.p_origin + ip * grid.dp();
      basis.cell_coords[col] = {bq, bp};
      for (int k = 0; k < per_cell; ++k) {
        const int row = iq * per_cell + k;
        const double q = grid.q_origin + (row + sample_offset) * dx;
        basis.frame(row, col) = norm * std::exp(Complex(0.0, bp * q / grid.hbar));
      }
    }
  }
  return basis;
}

PlanckBasis build_momentum_slice_basis(const PhaseSpaceGrid& grid, int p_grid_points,
                                       double sample_offset) {
  const int d = grid.cell_count();
  if (p_grid_points % grid.l_p != 0)
    throw std::invalid_argument(
        "build_momentum_slice_basis: p_grid_points not divisible by l_p");
  if (p_grid_points != d)
    throw std::invalid_argument(
        "build_momentum_slice_basis: p_grid_points must equal l_q*l_p for a complete basis");

  const double dps = grid.p_extent / d;
  const int per_cell = grid.l_q;  // d / l_p
  const double norm = 1.0 / std::sqrt(static_cast<double>(per_cell));

  PlanckBasis basis;
  basis.grid = grid;
  basis.kind = BasisKind::momentum_slice;
  basis.frame = CMatrix::Zero(d, d);
  basis.cell_coords.resize(d);
  for (int iq = 0; iq < grid.l_q; ++iq) {
    for (int ip = 0; ip < grid.l_p; ++ip) {
      const int col = grid.cell_index(iq, ip);
      const double bq = grid.q_origin + iq * grid.dq();
      const double bp = grid.p_origin + ip * grid.dp();
      basis.cell_coords[col] = {bq, bp};
      for (int k = 0; k < per_cell; ++k) {
        const int row = ip * per_cell + k;
        const double p = grid.p_origin + (row + sample_offset) * dps;
        basis.frame(row, col) = norm * std::exp(Complex(0.0, -bq * p / grid.hbar));
      }
    }
  }
  return basis;
}

int discrete_fock_cells_per_axis(int bosons) {
  const int d = bosons + 1;
  const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
  if (l * l != d || l % 2 == 0)
    throw std::invalid_argument("discrete_fock basis: N+1 = " + std::to_string(d) +
                                " is not an odd perfect square");
  return l;
}

PlanckBasis build_discrete_fock_basis(int bosons, int cells_per_axis, double q_offset) {
  const int l = discrete_fock_cells_per_axis(bosons);
  if (l != cells_per_axis)
    throw std::invalid_argument("build_discrete_fock_basis: expected L = " + std::to_string(l) +
                                " for N = " + std::to_string(bosons));
  const int n_bosons = bosons;
  const int d = n_bosons + 1;
  const int m = (l - 1) / 2;
  const double dq = two_pi / l;
  const double dp = static_cast<double>(l) / n_bosons;
  const double hbar = 1.0 / n_bosons;

  PlanckBasis basis;
  basis.grid = PhaseSpaceGrid(q_offset - 0.5 * dq, -(m + 0.5) * dp, two_pi, l * dp, l, l, hbar,
                              /*q_per=*/true, /*p_per=*/false);
  basis.kind = BasisKind::discrete_fock;
  basis.frame = CMatrix::Zero(d, d);
  basis.cell_coords.resize(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(l));
  for (int n1 = 0; n1 < l; ++n1) {
    for (int n2 = -m; n2 <= m; ++n2) {
      const int col = basis.grid.cell_index(n1, n2 + m);
      const double bq = q_offset + two_pi * n1 / l;
      const double bp = static_cast<double>(l) * n2 / n_bosons;
      basis.cell_coords[col] = {bq, bp};
      const int pn = l * n2;  // P * N
      for (int n = -m + pn; n <= m + pn; ++n) {
        const int s = n_bosons / 2 - n;  // p eigenvalue (N-2s)/2N = n/N
        basis.frame(s, col) = norm * std::exp(Complex(0.0, -bq * n));
      }
    }
  }
  return basis;
}

PlanckBasis transformed(const PlanckBasis& basis, const CMatrix& u) {
  if (u.cols() != basis.frame.rows())
    throw std::invalid_argument("transformed: frame dimension mismatch");
  PlanckBasis out = basis;
  out.frame = u * basis.frame;
  return out;
}

MacroscopicOps macroscopic_operators(const PlanckBasis& basis) {
  const CMatrix qh = basis.frame * basis.q_values().asDiagonal() * basis.frame.adjoint();
  const CMatrix ph = basis.frame * basis.p_values().asDiagonal() * basis.frame.adjoint();
  return {0.5 * (qh + qh.adjoint()), 0.5 * (ph + ph.adjoint())};
}

CVector cell_amplitudes(const CVector& state, const PlanckBasis& basis) {
  if (state.size() != basis.frame.rows())
    throw std::invalid_argument("cell_amplitudes: state dimension mismatch");
  return basis.frame.adjoint() * state;
}

CMatrix fourier_frame(const PhaseSpaceGrid& grid, double q_offset, double p_offset) {
  const int d = grid.cell_count();
  const double dx = grid.q_extent / d;
  const double dps = grid.p_extent / d;
  CMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    const double q = grid.q_origin + (j + q_offset) * dx;
    for (int n = 0; n < d; ++n) {
      const double p = grid.p_origin + (n + p_offset) * dps;
      f(j, n) = norm * std::exp(Complex(0.0, p * q / grid.hbar));
    }
  }
  return f;
}

}  // namespace qps
