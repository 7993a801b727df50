// End-to-end acceptance gate: one pass/fail line per criterion, exit code =
// number of failures. Thresholds are frozen from independent oracle runs;
// see the README for the reproduction recipes.

#include "qps/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

using namespace qps;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %2d %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// direct dense -<x|[A(t), B]^2|x>
double brute_cell(const CMatrix& u, const CMatrix& a, const CMatrix& b, int cell) {
  CMatrix a_t = u.adjoint() * a * u;
  CMatrix c = a_t * b - b * a_t;
  return (-(c * c))(cell, cell).real();
}

struct RotorRun {
  RVector section_70;          // C(70, x) per cell, cell frame
  double max_residual = 0.0;   // identity residual over the checked kicks
};

// One shared 70-kick evolution: the identity check at kicks 10/40/70
// (model-frame trace vs cell-frame average) and the kick-70 section.
RotorRun rotor_identity_and_section() {
  KickedRotorSpec spec{4.7, 30};
  PlanckBasis basis = kicked_rotor_cell_basis(spec);
  const int d = basis.dim();
  CMatrix u_model = kicked_rotor_floquet(spec);
  CMatrix u_cell = to_cell_frame(u_model, basis);
  MacroscopicOps ops = macroscopic_operators(basis);
  CMatrix p_cell = basis.p_values().cast<Complex>().asDiagonal();

  CMatrix a_model = ops.qhat;  // model frame
  CMatrix a_cell = basis.q_values().cast<Complex>().asDiagonal();

  RotorRun out;
  for (int k = 1; k <= 70; ++k) {
    a_model = (u_model.adjoint() * a_model * u_model).eval();
    a_model = ((a_model + a_model.adjoint()) / 2.0).eval();
    a_cell = (u_cell.adjoint() * a_cell * u_cell).eval();
    a_cell = ((a_cell + a_cell.adjoint()) / 2.0).eval();
    if (k == 10 || k == 40 || k == 70) {
      CMatrix c_model = commutator_i(a_model, ops.phat);
      const double thermal = (c_model * c_model).trace().real() / d;
      RVector cells = commutator_sq_diagonal(a_cell, p_cell);
      out.max_residual = std::max(out.max_residual, std::abs(thermal - cells.mean()));
      if (k == 70) out.section_70 = cells;
    }
  }
  return out;
}

void criterion_1_and_7() {
  RotorRun run = rotor_identity_and_section();
  report(1, "infinite-temperature value equals the cell average at 10/40/70 kicks",
         run.max_residual < 1e-10, "max residual " + fmt(run.max_residual));

  // classical mask from one long chaotic orbit seeded next to the hyperbolic
  // fixed point at the origin
  PhaseSpaceGrid grid = kicked_rotor_grid(30);
  SectionCloud orbit;
  PhasePoint x{1e-3, 1e-3};
  for (int i = 0; i < 20000; ++i) {
    x = standard_map_step(x, 4.7);
    orbit.points.push_back(x);
  }
  CellMask mask = classify_cells(orbit, grid, 1);

  std::vector<double> island_vals, sea_vals;
  for (int c : mask.cells(CellLabel::island)) island_vals.push_back(run.section_70(c));
  for (int c : mask.cells(CellLabel::sea)) sea_vals.push_back(run.section_70(c));
  const double ratio = median(sea_vals) / median(island_vals);
  const double overlap = island_valley_overlap(mask, run.section_70, 2.0);
  report(7, "island cells sit in the low-value valleys of the 70-kick section",
         !island_vals.empty() && ratio > 3.0 && overlap > 0.8,
         std::to_string(island_vals.size()) + " islands, sea/island median ratio " + fmt(ratio) +
             ", overlap " + fmt(overlap));
}

void criterion_2() {
  LmgSpec spec{8, -2.0};
  PlanckBasis basis = lmg_cell_basis(spec, lmg_saddle_q_offset(3));
  CMatrix h_cell = to_cell_frame(lmg_hamiltonian(spec), basis);
  CMatrix q = basis.q_values().cast<Complex>().asDiagonal();
  CMatrix p = basis.p_values().cast<Complex>().asDiagonal();
  SpectralEvolver ev(h_cell, 1.0);
  ClassicalSystem cls = ClassicalSystem::lmg_mean_field(-2.0);
  const int cell = basis.grid.locate(pi, 0.0);

  HeisenbergTrack track = heisenberg_track(ev.propagator(0.1), q, 10, 1, 0.1);
  OtocRecord rec = cell_otoc(track, p, basis, cell);
  OtocRecord thermal = thermal_otoc(track, p, ThermalWeight::infinite());

  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double t = 0.1 * k;
    CMatrix u = ev.propagator(t);
    worst = std::max(worst, std::abs(rec.values(k) - brute_cell(u, q, p, cell)));
    double mean = 0.0;
    for (int z = 0; z < 9; ++z) mean += brute_cell(u, q, p, z);
    worst = std::max(worst, std::abs(thermal.values(k) - mean / 9.0));

    CoarseMap g = coarse_map(cls, basis, t, u);
    CMatrix f = spreading_function(u, g);
    double c2 = 0.0;
    for (int xp = 0; xp < 9; ++xp)
      for (int z = 0; z < 9; ++z) {
        const double df = (xp == g.target[z] && z != cell) ? 1.0 : 0.0;
        (void)df;
        worst = std::max(worst, std::abs(f(xp, z) - (u(xp, z) - (xp == g.target[z]
                                                                     ? Complex(g.phase(z))
                                                                     : Complex(0.0)))));
      }
    for (int z = 0; z < 9; ++z) {
      const double dp = basis.grid.diff_p(basis.cell_coords[z].p, basis.cell_coords[cell].p);
      const double dq = basis.grid.diff_q(basis.cell_coords[g.target[z]].q,
                                          basis.cell_coords[g.target[cell]].q);
      c2 += dp * dp * dq * dq * std::norm(f(g.target[z], cell));
    }
    worst = std::max(worst, std::abs(second_order_otoc(f, g, basis, cell) - c2));
  }
  report(2, "D = 9 pipeline matches direct dense evaluation at 10 times", worst < 1e-10,
         "max deviation " + fmt(worst));
}

struct LmgRun {
  PlanckBasis basis;
  std::shared_ptr<SpectralEvolver> evolver;
  int saddle = 0;
};

LmgRun build_lmg() {
  LmgSpec spec{1680, -2.0};
  LmgRun run;
  run.basis = lmg_cell_basis(spec, lmg_saddle_q_offset(41));
  run.evolver =
      std::make_shared<SpectralEvolver>(to_cell_frame(lmg_hamiltonian(spec), run.basis), 1.0);
  run.saddle = run.basis.grid.locate(pi, 0.0);
  return run;
}

void criteria_3_4_9(const LmgRun& lmg) {
  const double target = 2.0 * std::sqrt(3.0);
  std::vector<double> times;
  for (int k = 0; k <= 30; ++k) times.push_back(0.05 * k);

  CMatrix p_macro = lmg.basis.p_values().cast<Complex>().asDiagonal();
  OtocRecord macro = cell_otoc_spectral(*lmg.evolver, p_macro, p_macro, lmg.basis, lmg.saddle,
                                        times);
  FitResult fit = fit_exponential(macro.times, macro.values, 0.3, 1.2);

  std::vector<double> w2 = width_track_spectral(*lmg.evolver, lmg.basis, lmg.saddle, times);
  FitResult wfit = fit_exponential(times, w2, 0.3, 1.2);

  const bool pass3 = std::abs(fit.exponent / target - 1.0) < 0.15 &&
                     std::abs(wfit.exponent / target - 1.0) < 0.15;
  report(3, "saddle-cell growth rates with the macroscopic pair match twice sqrt(3)", pass3,
         "otoc " + fmt(fit.exponent) + ", width " + fmt(wfit.exponent) + ", target " +
             fmt(target));

  CMatrix p_micro = to_cell_frame(lmg_momentum_operator(1680), lmg.basis);
  OtocRecord micro = cell_otoc_spectral(*lmg.evolver, p_micro, p_micro, lmg.basis, lmg.saddle,
                                        times);
  FitResult mfit = fit_exponential(micro.times, micro.values, 0.3, 1.2);
  report(4, "microscopic-pair growth rate deviates beyond its standard error",
         std::abs(mfit.exponent - target) > mfit.std_error,
         "exponent " + fmt(mfit.exponent) + " +- " + fmt(mfit.std_error));

  ClassicalSystem cls = ClassicalSystem::lmg_mean_field(-2.0);
  const int cell = lmg.basis.grid.locate(pi - 2 * pi / 41, 0.0);
  EhrenfestTrack track = ehrenfest_delta(lmg.evolver->propagator(0.05), lmg.basis, cell, cls,
                                         lmg.basis.grid.cell_center(cell), 50, 0.05);
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    if (track.times[i] < 1.2) early = std::max(early, track.delta[i]);
    if (track.times[i] <= 2.5) late = std::max(late, track.delta[i]);
  }
  const bool pass9 = early < 5.0 * track.plateau && late > 10.0 * track.plateau;
  report(9, "deviation from the classical track stays flat before breaking away", pass9,
         "plateau " + fmt(track.plateau) + ", max(t<1.2) " + fmt(early) + ", max(t<=2.5) " +
             fmt(late));
}

void criterion_5() {
  const double lmg = saddle_lyapunov(ClassicalSystem::lmg_mean_field(-2.0), {pi, 0.0});
  const double iho = saddle_lyapunov(ClassicalSystem::inverted_oscillator(), {0.0, 0.0});
  const bool pass = std::abs(lmg - std::sqrt(3.0)) < 1e-4 && std::abs(iho - 1.0) < 1e-6;
  report(5, "linearized saddle rates are sqrt(3) and 1", pass,
         "got " + fmt(lmg) + " and " + fmt(iho));
}

void criterion_6() {
  IhoSpec spec = iho_default_spec(0.002);
  CMatrix h = iho_hamiltonian(spec);
  PlanckBasis basis = iho_cell_basis(spec);
  CMatrix h_cell = to_cell_frame(h, basis);
  SpectralEvolver ev(h_cell, spec.hbar);

  // Gibbs weight: cumulative population below E = 0.05
  SpectralDecomp decomp = eig_hermitian(h);
  double z = 0.0, low = 0.0;
  const double e0 = decomp.eigenvalues(0);
  for (int k = 0; k < decomp.dim(); ++k) {
    const double w = std::exp(-(decomp.eigenvalues(k) - e0) / 0.1);
    z += w;
    if (decomp.eigenvalues(k) < 0.05) low += w;
  }
  const double cumulative = low / z;

  CMatrix rho_cell = to_cell_frame(gibbs_state(h, 0.1), basis);
  CMatrix q_micro = to_cell_frame(iho_position_operator(spec), basis);
  std::vector<double> t_thermal;
  for (int k = 0; k <= 40; ++k) t_thermal.push_back(0.05 * k);
  OtocRecord thermal = thermal_otoc_spectral(ev, q_micro, q_micro,
                                             ThermalWeight::gibbs(rho_cell), t_thermal);
  FitResult tfit = fit_exponential(thermal.times, thermal.values, 0.4, 1.6);

  CMatrix q_macro = basis.q_values().cast<Complex>().asDiagonal();
  const int center = basis.grid.locate(0.0, 0.0);
  std::vector<double> t_cell;
  for (int k = 0; k <= 30; ++k) t_cell.push_back(0.05 * k);
  OtocRecord cell = cell_otoc_spectral(ev, q_macro, q_macro, basis, center, t_cell);
  FitResult cfit = fit_exponential(cell.times, cell.values, 0.3, 1.2);

  const bool pass = cumulative > 0.70 && cumulative < 0.90 &&
                    std::abs(tfit.exponent / 2.0 - 1.0) < 0.15 &&
                    std::abs(cfit.exponent / 2.0 - 1.0) < 0.15;
  report(6, "inverted-oscillator growth rates are twice the classical rate", pass,
         "low-energy weight " + fmt(cumulative) + ", thermal " + fmt(tfit.exponent) +
             ", cell " + fmt(cfit.exponent));
}

void criterion_8() {
  KickedRotorSpec spec{1.3, 30};
  PlanckBasis basis = kicked_rotor_cell_basis(spec);
  const int d = basis.dim();
  CMatrix u_cell = to_cell_frame(kicked_rotor_floquet(spec), basis);
  CMatrix a = basis.q_values().cast<Complex>().asDiagonal();
  CMatrix p = basis.p_values().cast<Complex>().asDiagonal();
  const int island = basis.grid.cell_index(15, 0);
  const int sea = basis.grid.cell_index(0, 0);

  std::vector<double> island_curve, sea_curve, thermal_curve;
  for (int k = 1; k <= 100; ++k) {
    a = (u_cell.adjoint() * a * u_cell).eval();
    a = ((a + a.adjoint()) / 2.0).eval();
    CMatrix c = commutator_i(a, p);
    RVector diag = (c.adjoint() * c).diagonal().real();
    island_curve.push_back(diag(island));
    sea_curve.push_back(diag(sea));
    thermal_curve.push_back(diag.mean());
  }
  const double island_tail = saturation_stats(island_curve, 0.25).first;
  const double sea_tail = saturation_stats(sea_curve, 0.25).first;
  const double thermal_tail = saturation_stats(thermal_curve, 0.25).first;
  report(8, "mixed-regime tails order island < thermal < sea",
         island_tail < thermal_tail && thermal_tail < sea_tail,
         fmt(island_tail) + " < " + fmt(thermal_tail) + " < " + fmt(sea_tail));
}

void criterion_10() {
  bool pass = true;
  std::string detail;

  // orthonormality and completeness for the three basis kinds
  auto frame_error = [](const PlanckBasis& b) {
    const int d = b.dim();
    const double ortho = (CMatrix(b.frame.adjoint() * b.frame) - CMatrix::Identity(d, d))
                             .cwiseAbs()
                             .maxCoeff();
    const double complete = (CMatrix(b.frame * b.frame.adjoint()) - CMatrix::Identity(d, d))
                                .cwiseAbs()
                                .maxCoeff();
    return std::max(ortho, complete);
  };
  KickedRotorSpec rotor{4.7, 12};
  PlanckBasis slice = kicked_rotor_cell_basis(rotor);
  PhaseSpaceGrid grid = kicked_rotor_grid(12);
  PlanckBasis momentum = build_momentum_slice_basis(grid, 144, 0.0);
  PlanckBasis fock = lmg_cell_basis(LmgSpec{288, -2.0}, lmg_saddle_q_offset(17));
  const double basis_err =
      std::max({frame_error(slice), frame_error(momentum), frame_error(fock)});
  if (basis_err >= 1e-10) pass = false;
  detail += "basis " + fmt(basis_err);

  // positivity, exact zeros at t = 0, spectrum invariance on a small rotor
  CMatrix u_cell = to_cell_frame(kicked_rotor_floquet(rotor), slice);
  CMatrix q = slice.q_values().cast<Complex>().asDiagonal();
  CMatrix p = slice.p_values().cast<Complex>().asDiagonal();
  HeisenbergTrack track = heisenberg_track(u_cell, q, 12, 4);
  double min_value = 0.0, spectrum_drift = 0.0;
  RVector ref = eig_hermitian(track.a_t[0]).eigenvalues;
  for (int s = 0; s < track.samples(); ++s) {
    min_value = std::min(min_value, commutator_sq_diagonal(track.a_t[s], p).minCoeff());
    spectrum_drift = std::max(
        spectrum_drift, (eig_hermitian(track.a_t[s]).eigenvalues - ref).cwiseAbs().maxCoeff());
  }
  if (min_value < -1e-9 || spectrum_drift >= 1e-8) pass = false;
  detail += ", min otoc " + fmt(min_value) + ", spectrum drift " + fmt(spectrum_drift);

  if (commutator_sq_diagonal(q, p).cwiseAbs().maxCoeff() != 0.0) pass = false;

  ClassicalSystem cls = ClassicalSystem::standard_map(4.7);
  CoarseMap g0 = coarse_map(cls, slice, 0.0, CMatrix::Identity(144, 144));
  if (spreading_function(CMatrix::Identity(144, 144), g0).cwiseAbs().maxCoeff() != 0.0)
    pass = false;

  // determinism: identical artifacts for 1 and 3 worker threads
  namespace fs = std::filesystem;
  qps::exp::ExperimentConfig config;
  config.name = "determinism";
  config.model = "kicked_rotor";
  config.cells_per_axis = 8;
  config.seed = 5;
  qps::exp::ExperimentSpec section;
  section.kind = qps::exp::ExperimentKind::quantum_section;
  section.n_steps = 3;
  config.experiments.push_back(section);
  qps::exp::ExperimentSpec curve;
  curve.kind = qps::exp::ExperimentKind::otoc_curve;
  curve.cells.emplace_back(2, 2);
  curve.n_steps = 4;
  curve.thermal = true;
  config.experiments.push_back(curve);

  auto checksums = [](const qps::exp::RunManifest& m) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [path, sum] : m.outputs)
      out[fs::path(path).filename().string()] = sum;
    return out;
  };
  const fs::path base = fs::temp_directory_path() / "qps_acceptance";
  fs::remove_all(base);
  config.out_dir = base / "t1";
  config.threads = 1;
  auto sums1 = checksums(qps::exp::run(config));
  config.out_dir = base / "t3";
  config.threads = 3;
  auto sums3 = checksums(qps::exp::run(config));
  const bool deterministic = !sums1.empty() && sums1 == sums3;
  if (!deterministic) pass = false;
  detail += deterministic ? ", outputs thread-invariant" : ", outputs differ across threads";

  report(10, "property suite: bases, positivity, exact zeros, determinism", pass, detail);
}

}  // namespace

int main() {
  criterion_1_and_7();
  criterion_2();
  criterion_5();
  criterion_6();
  LmgRun lmg = build_lmg();
  criteria_3_4_9(lmg);
  criterion_8();
  criterion_10();
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures;
}
