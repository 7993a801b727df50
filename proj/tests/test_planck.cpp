#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qps/models.hpp"
#include "qps/planck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace qps;

namespace {
constexpr double pi = std::numbers::pi;

double orthonormality_error(const PlanckBasis& basis) {
  const int d = basis.dim();
  return (CMatrix(basis.frame.adjoint() * basis.frame) - CMatrix::Identity(d, d))
      .cwiseAbs()
      .maxCoeff();
}

double completeness_error(const PlanckBasis& basis) {
  const int d = basis.dim();
  return (CMatrix(basis.frame * basis.frame.adjoint()) - CMatrix::Identity(d, d))
      .cwiseAbs()
      .maxCoeff();
}
}  // namespace

TEST_CASE("grid cell area is 2 pi hbar and cell centers sit on the lattice") {
  PhaseSpaceGrid grid(0.0, -1.0, 2.0, 2.0, 4, 5, 2.0 * 2.0 / (4 * 5) / (2 * pi));
  CHECK(grid.dq() * grid.dp() == doctest::Approx(2 * pi * grid.hbar).epsilon(1e-12));
  PhasePoint c = grid.cell_center(grid.cell_index(1, 2));
  CHECK(c.q == doctest::Approx(0.0 + 1.5 * grid.dq()));
  CHECK(c.p == doctest::Approx(-1.0 + 2.5 * grid.dp()));
  CHECK(grid.locate(c.q, c.p) == grid.cell_index(1, 2));
}

TEST_CASE("grid construction rejects a cell area inconsistent with hbar") {
  CHECK_THROWS_AS(PhaseSpaceGrid(0.0, 0.0, 1.0, 1.0, 4, 4, 1.0), std::invalid_argument);
}

TEST_CASE("single-cell position-slice basis is one uniform-phase unit column") {
  const double hbar = 1.0 / (2 * pi);
  PhaseSpaceGrid grid(0.0, 0.0, 1.0, 1.0, 1, 1, hbar);
  PlanckBasis basis = build_position_slice_basis(grid, 1);
  CHECK(basis.dim() == 1);
  CHECK(basis.frame.col(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("position-slice columns are pairwise orthonormal at D = 36") {
  const int l = 6;
  const double hbar = 1.0 / (2 * pi * l * l);
  PhaseSpaceGrid grid(0.0, 0.0, 1.0, 1.0, l, l, hbar);
  PlanckBasis basis = build_position_slice_basis(grid, l * l);
  CHECK(orthonormality_error(basis) < 1e-10);
  CHECK(completeness_error(basis) < 1e-10);
  for (int a = 0; a < basis.dim(); ++a)
    for (int b = a + 1; b < basis.dim(); ++b)
      CHECK(std::abs(basis.frame.col(a).dot(basis.frame.col(b))) < 1e-10);
}

TEST_CASE("square inverted-oscillator grid has dq = sqrt(2 pi hbar)") {
  IhoSpec spec = iho_default_spec(0.0005);
  PhaseSpaceGrid grid = iho_grid(spec);
  CHECK(grid.q_extent == doctest::Approx(1.0));
  CHECK(grid.dq() == doctest::Approx(std::sqrt(2 * pi * 0.0005)).epsilon(0.15));
  CHECK(grid.dq() * grid.dp() == doctest::Approx(2 * pi * 0.0005).epsilon(1e-12));
}

TEST_CASE("momentum-slice basis is orthonormal on the rotor torus") {
  KickedRotorSpec spec{4.7, 30};
  PhaseSpaceGrid grid = kicked_rotor_grid(30);
  PlanckBasis basis = build_momentum_slice_basis(grid, 900, 0.0);
  CHECK(basis.dim() == 900);
  CHECK(orthonormality_error(basis) < 1e-10);
}

TEST_CASE("position/momentum cross overlap concentrates on the matching cell as hbar shrinks") {
  // The sharp-slice overlap integral depends only on the product dq*dp =
  // 2*pi*hbar, so the matching-cell weight itself is scale-invariant
  // (~0.206); what sharpens as hbar decreases is the ratio to any cell a
  // fixed physical distance away.
  auto overlap = [](int l, int offset_cells) {
    const double hbar = 1.0 / (2 * pi * l * l);
    PhaseSpaceGrid grid(0.0, 0.0, 1.0, 1.0, l, l, hbar);
    PlanckBasis pos = build_position_slice_basis(grid, l * l);
    PlanckBasis mom = build_momentum_slice_basis(grid, l * l);
    CMatrix f = fourier_frame(grid, 0.5, 0.5);
    int match = grid.cell_index(l / 2, l / 2);
    int other = grid.cell_index(l / 2 + offset_cells, l / 2);
    CVector col = pos.frame.adjoint() * (f * mom.frame.col(match));
    return std::pair{std::norm(col(match)), std::norm(col(other))};
  };
  auto [match6, distant6] = overlap(6, 6 / 4);    // offset = 1/4 of the box
  auto [match12, distant12] = overlap(12, 12 / 4);
  CHECK(match6 == doctest::Approx(0.2061).epsilon(0.01));
  CHECK(match12 == doctest::Approx(0.2026).epsilon(0.01));
  const double ratio6 = match6 / distant6;
  const double ratio12 = match12 / distant12;
  CHECK(ratio6 > 10.0);
  CHECK(ratio12 > 4.0 * ratio6 / 2.0);  // sharpening with hbar -> hbar/4
}

TEST_CASE("discrete two-mode basis at 8 bosons matches the closed form") {
  PlanckBasis basis = build_discrete_fock_basis(8, 3);
  CHECK(basis.dim() == 9);
  CHECK(orthonormality_error(basis) < 1e-10);
  CHECK(completeness_error(basis) < 1e-10);

  // P labels take exactly the values {-3/8, 0, 3/8}
  const RVector p_labels = basis.p_values();
  std::set<double> pvals(p_labels.begin(), p_labels.end());
  CHECK(pvals.size() == 3);
  CHECK(*pvals.begin() == doctest::Approx(-3.0 / 8.0));
  CHECK(*pvals.rbegin() == doctest::Approx(3.0 / 8.0));

  // independent entry-by-entry evaluation of the defining sum
  const int n_bosons = 8, l = 3, m = 1;
  for (int col = 0; col < basis.dim(); ++col) {
    const double qc = basis.cell_coords[col].q;
    const double pc = basis.cell_coords[col].p;
    const int n2 = static_cast<int>(std::lround(pc * n_bosons / l));
    for (int s = 0; s <= n_bosons; ++s) {
      const int n = n_bosons - 2 * s;  // p = n / (2N) * 2 -> (N - 2s)/2N scaled by 2N = n
      Complex expect = 0.0;
      for (int k = -m; k <= m; ++k) {
        if (n == 2 * (k + n2 * l)) {  // momentum index inside the slice
          const double p = static_cast<double>(n) / (2.0 * n_bosons);
          expect = std::polar(1.0 / std::sqrt(static_cast<double>(l)), -n_bosons * qc * p);
        }
      }
      CHECK(std::abs(basis.frame(s, col) - expect) < 1e-10);
    }
  }
}

TEST_CASE("boson counts must satisfy N + 1 = L^2 with L odd") {
  CHECK(discrete_fock_cells_per_axis(8) == 3);
  CHECK(discrete_fock_cells_per_axis(1680) == 41);
  CHECK_THROWS_AS(discrete_fock_cells_per_axis(1681), std::invalid_argument);
  CHECK_THROWS_AS(discrete_fock_cells_per_axis(15), std::invalid_argument);  // L = 4 even
}

TEST_CASE("macroscopic operators are the diagonal cell coordinates") {
  PlanckBasis basis = build_discrete_fock_basis(8, 3);
  MacroscopicOps ops = macroscopic_operators(basis);
  CHECK(hermiticity_error(ops.qhat) < 1e-12);
  CHECK(hermiticity_error(ops.phat) < 1e-12);

  // exact commutation: same diagonalizing frame
  CHECK((ops.qhat * ops.phat - ops.phat * ops.qhat).cwiseAbs().maxCoeff() < 1e-12);

  // expectation sweep: <x|Q|x> = Q_x
  for (int j = 0; j < basis.dim(); ++j) {
    const CVector col = basis.frame.col(j);
    CHECK(std::abs(Complex(col.dot(ops.qhat * col)) - basis.cell_coords[j].q) < 1e-10);
    CHECK(std::abs(Complex(col.dot(ops.phat * col)) - basis.cell_coords[j].p) < 1e-10);
  }

  // spectrum of Q equals the multiset of Q coordinates
  RVector eig = eig_hermitian(ops.qhat).eigenvalues;
  RVector coords = basis.q_values();
  std::sort(coords.begin(), coords.end());
  for (int j = 0; j < basis.dim(); ++j) CHECK(eig(j) == doctest::Approx(coords(j)).epsilon(1e-10));
}

TEST_CASE("lattice labels take exactly l_q and l_p distinct values") {
  KickedRotorSpec spec{4.7, 6};
  PlanckBasis basis = kicked_rotor_cell_basis(spec);
  const RVector q_labels = basis.q_values();
  const RVector p_labels = basis.p_values();
  std::set<double> qs(q_labels.begin(), q_labels.end());
  std::set<double> ps(p_labels.begin(), p_labels.end());
  CHECK(static_cast<int>(qs.size()) == 6);
  CHECK(static_cast<int>(ps.size()) == 6);
}

TEST_CASE("cell_amplitudes is the frame change") {
  PlanckBasis basis = build_discrete_fock_basis(8, 3);

  // a cell column maps to a unit vector
  CVector amp = cell_amplitudes(basis.frame.col(4), basis);
  for (int j = 0; j < 9; ++j)
    CHECK(std::abs(amp(j) - (j == 4 ? Complex(1.0) : Complex(0.0))) < 1e-10);

  // norm preservation on a random state
  CVector psi = CVector::Random(9).normalized();
  CHECK(cell_amplitudes(psi, basis).norm() == doctest::Approx(psi.norm()).epsilon(1e-10));

  // uniform superposition of all cell states -> amplitudes 1/sqrt(D)
  CVector uniform = CVector::Zero(9);
  for (int j = 0; j < 9; ++j) uniform += basis.frame.col(j);
  uniform /= 3.0;
  CVector u_amp = cell_amplitudes(uniform, basis);
  for (int j = 0; j < 9; ++j) CHECK(std::abs(u_amp(j) - Complex(1.0 / 3.0)) < 1e-10);

  CHECK_THROWS_AS(cell_amplitudes(CVector::Zero(5), basis), std::invalid_argument);
}
